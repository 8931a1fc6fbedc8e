#pragma once

#include <stdexcept>
#include <string>

namespace qcr {

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define QCR_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                    \
   public:                                                       \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  };

QCR_DEFINE_ERROR(NotDefinite)
QCR_DEFINE_ERROR(SingularSystem)
QCR_DEFINE_ERROR(DomainError)
QCR_DEFINE_ERROR(DegenerateStructure)
QCR_DEFINE_ERROR(LeviInconsistent)
QCR_DEFINE_ERROR(NotRotation)
QCR_DEFINE_ERROR(BadParams)
QCR_DEFINE_ERROR(SingularPoint)
QCR_DEFINE_ERROR(NotStronglyPseudoconvex)
QCR_DEFINE_ERROR(NotAntisymmetric)
QCR_DEFINE_ERROR(DimensionSeven)
QCR_DEFINE_ERROR(NotUltraPseudoconvex)
QCR_DEFINE_ERROR(NoReebField)
QCR_DEFINE_ERROR(ConfigError)

#undef QCR_DEFINE_ERROR

}  // namespace qcr

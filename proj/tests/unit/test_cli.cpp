#include <gtest/gtest.h>

#include <sstream>

#include "config.hpp"
#include "presets.hpp"
#include "runner.hpp"

using namespace qcrlab;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

Json without_meta(Json j) {
  j.erase("meta");
  return j;
}

}  // namespace

TEST(Config, ParsesAllSections) {
  const auto c = parse(
      "[manifold]\nname = ellipsoid\nn = 2\npreset = generic\n"
      "[run]\ntasks = levi, qcontact\nsamples = 7\nseed = 42\n"
      "[tolerances]\nqcontact = 1e-6\n"
      "[expect]\nqcontact = fail\n");
  EXPECT_EQ(c.manifold, "ellipsoid");
  EXPECT_EQ(c.n, 2);
  EXPECT_EQ(c.params.at("preset"), "generic");
  EXPECT_EQ(c.tasks, (std::vector<std::string>{"levi", "qcontact"}));
  EXPECT_EQ(c.samples, 7);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_DOUBLE_EQ(c.tolerance("qcontact"), 1e-6);
  EXPECT_DOUBLE_EQ(c.tolerance("levi"), default_tolerance("levi"));
  EXPECT_FALSE(c.expect.at("qcontact"));
  EXPECT_NO_THROW(build_manifold(c));
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse("[bogus]\nx = 1\n"), qcr::ConfigError);
  EXPECT_THROW(parse("[manifold]\nname = sphere\n[run]\ntasks = levi, flying\n"), qcr::ConfigError);
  EXPECT_THROW(parse("[manifold]\nname = sphere\n[run]\nsamples = many\n"), qcr::ConfigError);
  EXPECT_THROW(parse("[manifold]\nname = sphere\n[run]\ncolour = red\n"), qcr::ConfigError);
  EXPECT_THROW(parse("[manifold]\nname = sphere\n[expect]\nlevi = maybe\n"), qcr::ConfigError);
  EXPECT_THROW(build_manifold(parse("[manifold]\nname = torus\n")), qcr::ConfigError);
  EXPECT_THROW(build_manifold(parse("[manifold]\nname = t3_hopf\nn = 2\n")), qcr::ConfigError);
  EXPECT_THROW(load_config("/nonexistent/run.ini"), qcr::ConfigError);
}

TEST(Runner, EmptyTaskListGivesAValidReport) {
  const auto r = run(parse("[manifold]\nname = sphere\nn = 2\n[run]\nsamples = 3\n"), 1);
  EXPECT_EQ(r["meta"]["schema_version"], kSchemaVersion);
  EXPECT_TRUE(r["tasks"].empty());
  EXPECT_TRUE(all_passed(r));
  EXPECT_FALSE(r["summary"]["determinism_hash"].get<std::string>().empty());
}

TEST(Runner, SphereLeviPassesAndRecordsCarryTolerance) {
  const auto r = run(parse("[manifold]\nname = sphere\nn = 2\n[run]\ntasks = levi\nsamples = 4\nseed = 3\n"), 1);
  ASSERT_EQ(r["tasks"].size(), 1u);
  const auto& t = r["tasks"][0];
  EXPECT_TRUE(t["pass"].get<bool>());
  ASSERT_EQ(t["records"].size(), 4u);
  for (const auto& rec : t["records"]) {
    EXPECT_DOUBLE_EQ(rec["tolerance"].get<double>(), default_tolerance("levi"));
    EXPECT_LE(rec["residual"].get<double>(), rec["tolerance"].get<double>());
  }
  EXPECT_TRUE(all_passed(r));
}

TEST(Runner, DeterministicAcrossThreadCounts) {
  const auto cfg = parse(
      "[manifold]\nname = ellipsoid\nn = 2\npreset = generic\n"
      "[run]\ntasks = integrability, qcontact, canonical\nsamples = 6\nseed = 9\n");
  const auto a = run(cfg, 1), b = run(cfg, 3);
  EXPECT_EQ(serialize(without_meta(a)), serialize(without_meta(b)));
  EXPECT_EQ(determinism_hash(a), determinism_hash(b));
  EXPECT_EQ(a["summary"]["determinism_hash"], b["summary"]["determinism_hash"]);
  auto c = cfg;
  c.seed = 10;
  EXPECT_NE(determinism_hash(a), determinism_hash(run(c, 1)));
}

TEST(Runner, PointErrorsAreRecorded) {
  const auto r = run(parse(
                         "[manifold]\nname = deformed_heisenberg\nn = 2\npreset = indefinite\n"
                         "[run]\ntasks = canonical\nsamples = 2\n"),
                     1);
  const auto& t = r["tasks"][0];
  EXPECT_FALSE(t["pass"].get<bool>());
  for (const auto& rec : t["records"]) {
    EXPECT_EQ(rec["error"]["kind"], "NotUltraPseudoconvex");
    EXPECT_TRUE(rec["residual"].is_null());
  }
}

TEST(Runner, SerializationUsesFullPrecision) {
  Json j;
  j["x"] = 0.1;
  j["bad"] = std::numeric_limits<double>::infinity();
  const auto s = serialize(j);
  EXPECT_NE(s.find("0.10000000000000001"), std::string::npos);
  EXPECT_NE(s.find("null"), std::string::npos);
}

TEST(Presets, ExistAndParse) {
  for (const auto& name : {"sphere-curvature-n2", "ellipsoid-qc-fail", "hopf-t3-usc"}) ASSERT_TRUE(find_preset(name)) << name;
  for (const auto& p : presets()) {
    std::istringstream in(p.config);
    const auto c = parse_config(in);
    EXPECT_NO_THROW(build_manifold(c)) << p.name;
    EXPECT_FALSE(p.summary.empty());
  }
  EXPECT_FALSE(find_preset("nope"));
  for (const auto& t : known_tasks()) EXPECT_FALSE(explain_task(t).empty()) << t;
  EXPECT_TRUE(explain_task("nope").empty());
}

TEST(Presets, QContactFailureIsExpected) {
  std::istringstream in(find_preset("ellipsoid-qc-fail")->config);
  auto c = parse_config(in);
  c.samples = 3;
  const auto r = run(c, 1);
  EXPECT_FALSE(all_passed(r));
  EXPECT_TRUE(r["summary"]["expectations_met"].get<bool>());
}

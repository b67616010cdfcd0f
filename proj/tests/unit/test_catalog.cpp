#include <gtest/gtest.h>

#include "support.hpp"

using namespace gsr;
using namespace gsr::testing;

namespace {

std::vector<std::string> problems_of(std::string_view doc) {
  try {
    load_catalog(doc);
  } catch (const CatalogError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& text) {
  for (const auto& p : problems) {
    if (p.find(text) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST(Load, EmptyDocuments) {
  EXPECT_TRUE(load_catalog("").empty());
  EXPECT_TRUE(load_catalog("{}").empty());
}

TEST(Load, Builtin) {
  const auto& c = builtin_catalog();
  ASSERT_NE(c.action("LIN"), nullptr);
  EXPECT_EQ(c.action("LIN")->duration_param, "duration_ticks");
  EXPECT_EQ(c.action("LIN")->param("brake_ticks")->default_value, Literal{std::int64_t{0}});
  ASSERT_NE(c.sensor("DigitalInput"), nullptr);
  EXPECT_TRUE(c.sensor("DigitalInput")->standalone);
  EXPECT_TRUE(c.factory("origin")->is_static);
  EXPECT_EQ(c.factory("nope"), nullptr);
  EXPECT_EQ(load_catalog(builtin_catalog_text()).factories().size(), c.factories().size());
}

TEST(Load, ProblemsCarryJsonPaths) {
  const auto p = problems_of(R"({
    "sensor_types": {"S": {"kind": "frame"}},
    "device_types": {"D": {"sensors": [{"factory": "f", "type": "Missing"}], "states": ["SensorTrue"]}},
    "action_types": {"A": {"devices": ["Nowhere"], "params": [], "duration_param": "d"}},
    "factories": {"g": {"owners": ["Ghost"], "args": [], "returns": "state"}},
    "extra": 1
  })");
  EXPECT_TRUE(mentions(p, "/extra: unknown member"));
  EXPECT_TRUE(mentions(p, "/sensor_types/S/kind"));
  EXPECT_TRUE(mentions(p, "unknown sensor type 'Missing'"));
  EXPECT_TRUE(mentions(p, "/device_types/D/states"));
  EXPECT_TRUE(mentions(p, "/action_types/A/devices/0"));
  EXPECT_TRUE(mentions(p, "/factories/g/owners/0"));
  EXPECT_GE(p.size(), 6u);
}

TEST(Load, DefaultMustMatchKind) {
  const auto p = problems_of(R"({
    "device_types": {"D": {}},
    "action_types": {"A": {"devices": ["D"], "params": [{"name": "n", "kind": "int", "default": "x"}]}}
  })");
  EXPECT_TRUE(mentions(p, "/default"));
}

TEST(Load, NotJson) { EXPECT_THROW(load_catalog("{"), CatalogError); }

TEST(Kinds, LiteralFits) {
  EXPECT_TRUE(literal_fits(std::int64_t{1}, ValueKind::Real));
  EXPECT_FALSE(literal_fits(1.5, ValueKind::Int));
  EXPECT_TRUE(literal_fits(std::string("a"), ValueKind::Frame));
  EXPECT_FALSE(literal_fits(true, ValueKind::String));
  EXPECT_FALSE(literal_fits(true, ValueKind::State));
  for (int i = 0; i <= static_cast<int>(ValueKind::State); ++i) {
    const auto k = static_cast<ValueKind>(i);
    EXPECT_EQ(parse_value_kind(to_string(k)), k);
  }
}

TEST(Suggest, TiersThenDisplay) {
  const auto d = load_diagram(corpus_path("examples/two_robot_drop.gsr"));
  const auto frames = suggest(builtin_catalog(), ValueKind::Frame, d);
  std::vector<std::string> shown;
  for (const auto& s : frames) shown.push_back(s.display);
  EXPECT_EQ(shown, (std::vector<std::string>{"leftLWR.getHomePosition()", "rightLWR.getHomePosition()",
                                             "LWR.origin()", "frame(string)"}));
  EXPECT_EQ(frames[2].tier, Suggestion::Tier::Type);
  EXPECT_EQ(frames[3].tier, Suggestion::Tier::Global);
}

TEST(Suggest, StatesFromSensorsAndActions) {
  const auto d = load_diagram(corpus_path("examples/two_robot_drop.gsr"));
  const auto states = suggest(builtin_catalog(), ValueKind::State, d);
  std::vector<std::string> shown;
  for (const auto& s : states) shown.push_back(s.display);
  EXPECT_EQ(shown, (std::vector<std::string>{
                       "leftForce.isGreater(real)", "leftForce.isLess(real)", "leftLIN.motionTimePercent(real)",
                       "rightForce.isGreater(real)", "rightForce.isLess(real)",
                       "rightLIN.motionTimePercent(real)"}));
}

TEST(Suggest, EmptyContextLeavesGlobals) {
  Diagram d;
  d.name = "D";
  const auto frames = suggest(builtin_catalog(), ValueKind::Frame, d);
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_EQ(frames[0].factory, "frame");
}

#include <gtest/gtest.h>

#include "desctrack/errors.hpp"
#include "desctrack/run_config.hpp"

using namespace desctrack;

TEST(RunConfig, DefaultsInSnapshot) {
  const auto snap = config_snapshot(RunConfig{});
  const auto keys = config_keys();
  ASSERT_EQ(snap.size(), keys.size());
  std::map<std::string, std::string> m(snap.begin(), snap.end());
  EXPECT_EQ(m["detector.max_features"], "2500");
  EXPECT_EQ(m["detector.octaves"], "4");
  EXPECT_EQ(m["matcher.rho"], "0.8");
  EXPECT_EQ(m["tracker.lk_window"], "21");
  EXPECT_EQ(m["eval.upsilon"], "0.25,0.5,0.75");
}

TEST(RunConfig, ParsesKeysAndComments) {
  const auto c = parse_run_config(
      "# tuned\n"
      "detector.max_features = 1000\n"
      "\n"
      "matcher.cross_check=true\n"
      "tracker.ransac_seed=42\n"
      "tracker.fb_error_threshold = 0.5\n"
      "eval.upsilon = 0.1, 0.9\n");
  EXPECT_EQ(c.tracker.detector.max_features, 1000);
  EXPECT_TRUE(c.tracker.matcher.cross_check);
  EXPECT_EQ(c.tracker.ransac_seed, 42u);
  EXPECT_DOUBLE_EQ(c.tracker.fb_error_threshold, 0.5);
  EXPECT_EQ(c.eval.upsilon_levels, (std::vector<double>{0.1, 0.9}));
  EXPECT_EQ(c.tracker.detector.octaves, 4);
}

TEST(RunConfig, SnapshotRoundTrip) {
  RunConfig c;
  c.tracker.detector.fast_threshold = 33;
  c.tracker.lk_epsilon = 0.003;
  std::string text;
  for (const auto& [k, v] : config_snapshot(c)) text += k + "=" + v + "\n";
  EXPECT_EQ(config_snapshot(parse_run_config(text)), config_snapshot(c));
}

TEST(RunConfig, ErrorsNameTheLine) {
  try {
    parse_run_config("detector.octaves=3\ndetector.colour=red\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("detector.colour"), std::string::npos);
  }
  EXPECT_THROW(parse_run_config("detector.octaves=three\n"), ConfigError);
  EXPECT_THROW(parse_run_config("matcher.cross_check=maybe\n"), ConfigError);
  EXPECT_THROW(parse_run_config("just words\n"), ConfigError);
  EXPECT_THROW(parse_run_config("detector.octaves=0\n"), ConfigError);
  EXPECT_THROW(parse_run_config("eval.upsilon=0.5,0.2\n"), ConfigError);
  EXPECT_THROW(load_run_config("/nonexistent/cfg.txt"), ConfigError);
}

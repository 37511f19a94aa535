#include "desctrack/run_config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <type_traits>

namespace desctrack {

void RunConfig::validate() const {
  tracker.validate();
  eval.validate();
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double to_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) throw ConfigError(key + ": not a number: " + v);
  return d;
}

long long to_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long d = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size()) throw ConfigError(key + ": not an integer: " + v);
  return d;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": not a boolean: " + v);
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename Member>
Field int_field(std::string key, Member member) {
  return {key,
          [key, member](RunConfig& c, const std::string& v) {
            member(c) = static_cast<std::remove_cvref_t<decltype(member(c))>>(to_int(key, v));
          },
          [member](const RunConfig& c) {
            return std::to_string(member(c));
          }};
}

template <typename Member>
Field real_field(std::string key, Member member) {
  return {key, [key, member](RunConfig& c, const std::string& v) { member(c) = to_real(key, v); },
          [member](const RunConfig& c) { return format_real(member(c)); }};
}

template <typename Member>
Field bool_field(std::string key, Member member) {
  return {key, [key, member](RunConfig& c, const std::string& v) { member(c) = to_bool(key, v); },
          [member](const RunConfig& c) {
            return std::string(member(c) ? "true" : "false");
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      int_field("detector.max_features", [](auto& c) -> auto& { return c.tracker.detector.max_features; }),
      int_field("detector.octaves", [](auto& c) -> auto& { return c.tracker.detector.octaves; }),
      int_field("detector.fast_threshold", [](auto& c) -> auto& { return c.tracker.detector.fast_threshold; }),
      int_field("detector.arc_length", [](auto& c) -> auto& { return c.tracker.detector.arc_length; }),
      int_field("detector.nms_radius", [](auto& c) -> auto& { return c.tracker.detector.nms_radius; }),
      real_field("detector.pyramid_scale", [](auto& c) -> auto& { return c.tracker.detector.pyramid_scale; }),
      real_field("matcher.rho", [](auto& c) -> auto& { return c.tracker.matcher.rho; }),
      bool_field("matcher.cross_check", [](auto& c) -> auto& { return c.tracker.matcher.cross_check; }),
      bool_field("matcher.single_candidate_unambiguous",
                 [](auto& c) -> auto& { return c.tracker.matcher.single_candidate_unambiguous; }),
      real_field("tracker.fb_error_threshold", [](auto& c) -> auto& { return c.tracker.fb_error_threshold; }),
      int_field("tracker.lk_window", [](auto& c) -> auto& { return c.tracker.lk_window; }),
      int_field("tracker.lk_pyramid_levels", [](auto& c) -> auto& { return c.tracker.lk_pyramid_levels; }),
      int_field("tracker.lk_max_iters", [](auto& c) -> auto& { return c.tracker.lk_max_iters; }),
      real_field("tracker.lk_epsilon", [](auto& c) -> auto& { return c.tracker.lk_epsilon; }),
      real_field("tracker.lk_min_eigenvalue", [](auto& c) -> auto& { return c.tracker.lk_min_eigenvalue; }),
      int_field("tracker.min_inliers", [](auto& c) -> auto& { return c.tracker.min_inliers; }),
      int_field("tracker.ransac_iters", [](auto& c) -> auto& { return c.tracker.ransac_iters; }),
      real_field("tracker.ransac_inlier_px", [](auto& c) -> auto& { return c.tracker.ransac_inlier_px; }),
      int_field("tracker.ransac_seed", [](auto& c) -> auto& { return c.tracker.ransac_seed; }),
      int_field("tracker.min_match_support", [](auto& c) -> auto& { return c.tracker.min_match_support; }),
      real_field("tracker.search_inflation", [](auto& c) -> auto& { return c.tracker.search_inflation; }),
      {"eval.upsilon",
       [](RunConfig& c, const std::string& v) {
         std::vector<double> levels;
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) levels.push_back(to_real("eval.upsilon", trim(item)));
         c.eval.upsilon_levels = std::move(levels);
       },
       [](const RunConfig& c) {
         std::string out;
         for (const double u : c.eval.upsilon_levels) out += (out.empty() ? "" : ",") + format_real(u);
         return out;
       }},
  };
  return f;
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.key);
  return keys;
}

RunConfig parse_run_config(std::string_view text, RunConfig cfg) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    bool found = false;
    for (const auto& f : fields()) {
      if (f.key != key) continue;
      try {
        f.set(cfg, value);
      } catch (const ConfigError& e) {
        throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
      }
      found = true;
      break;
    }
    if (!found) {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), std::move(base));
}

std::vector<std::pair<std::string, std::string>> config_snapshot(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(cfg));
  return out;
}

}  // namespace desctrack

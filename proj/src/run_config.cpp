#include "vclip/run_config.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "vclip/error.hpp"
#include "vclip/feature_io.hpp"

namespace vclip {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& value, const std::string& where) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw InvalidArgument(where + ": cannot parse '" + value + "'");
  return out;
}

std::size_t parse_positive(const std::string& value, const std::string& where) {
  const auto v = parse_number<std::size_t>(value, where);
  if (v == 0) throw InvalidArgument(where + ": value must be positive");
  return v;
}

}  // namespace

RunConfig RunConfig::merged_with(const RunConfig& o) const {
  RunConfig out = *this;
  if (o.num_clips) out.num_clips = o.num_clips;
  if (o.top_k) out.top_k = o.top_k;
  if (o.frame_budget) out.frame_budget = o.frame_budget;
  if (o.temperature) out.temperature = o.temperature;
  if (o.seed) out.seed = o.seed;
  if (o.strategy) out.strategy = o.strategy;
  return out;
}

RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw InvalidArgument(where + ": duplicate key '" + key + "'");

    if (key == "num_clips") {
      cfg.num_clips = parse_positive(value, where);
    } else if (key == "top_k") {
      cfg.top_k = parse_positive(value, where);
    } else if (key == "frame_budget") {
      cfg.frame_budget = parse_positive(value, where);
    } else if (key == "temperature") {
      // from_chars for double is missing from older libstdc++; stod is fine here.
      std::size_t used = 0;
      double tau = 0.0;
      try {
        tau = std::stod(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != value.size() || !(tau > 0.0) || !std::isfinite(tau)) {
        throw InvalidArgument(where + ": temperature must be a positive number");
      }
      cfg.temperature = tau;
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(value, where);
    } else if (key == "strategy") {
      if (value.empty()) throw InvalidArgument(where + ": strategy must not be empty");
      cfg.strategy = value;
    } else {
      throw InvalidArgument(where + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  try {
    return parse_run_config(read_text_file(path));
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

}  // namespace vclip

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qrmt/experiment.hpp"

namespace qrmt {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": cannot parse '" + text + "'");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "on" || text == "true" || text == "yes" || text == "1") return true;
  if (text == "off" || text == "false" || text == "no" || text == "0") return false;
  throw ConfigError(key + ": expected on/off, got '" + text + "'");
}

// "0.1", "n^-1/2", "2*n^-1/2", "1.5*n^-2/5"
StieltjesRule parse_rule(const std::string& text) {
  StieltjesRule rule;
  std::string rest = text;
  const auto star = text.find('*');
  if (star != std::string::npos) {
    rule.scale = parse_number<double>("stieltjes_v", trim(text.substr(0, star)));
    rest = trim(text.substr(star + 1));
  } else if (text.rfind("n^", 0) != 0) {
    rule.kind = StieltjesRule::Kind::constant;
    rule.scale = parse_number<double>("stieltjes_v", text);
    return rule;
  }
  if (rest == "n^-1/2") {
    rule.kind = StieltjesRule::Kind::inv_sqrt;
  } else if (rest == "n^-2/5") {
    rule.kind = StieltjesRule::Kind::inv_two_fifths;
  } else {
    throw ConfigError("stieltjes_v: unknown rule '" + text + "'");
  }
  return rule;
}

}  // namespace

double StieltjesRule::at(int n) const {
  switch (kind) {
    case Kind::constant: return scale;
    case Kind::inv_sqrt: return scale / std::sqrt(static_cast<double>(n));
    case Kind::inv_two_fifths: return scale * std::pow(static_cast<double>(n), -0.4);
  }
  return scale;
}

std::string StieltjesRule::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << scale;
  if (kind == Kind::inv_sqrt) os << "*n^-1/2";
  if (kind == Kind::inv_two_fifths) os << "*n^-2/5";
  return os.str();
}

void SweepConfig::validate() const {
  try {
    ensemble.validate();
  } catch (const InvalidSpec& e) {
    throw ConfigError(std::string("ensemble: ") + e.what());
  }
  if (n_list.empty()) throw ConfigError("n_list must not be empty");
  if (!std::is_sorted(n_list.begin(), n_list.end())) throw ConfigError("n_list must be sorted ascending");
  if (std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end()) throw ConfigError("n_list has duplicates");
  if (n_list.front() < 1) throw ConfigError("n_list entries must be positive");
  if (reps < 1) throw ConfigError("reps must be at least 1");
  if (!(stieltjes_v.scale > 0.0)) throw ConfigError("stieltjes_v must be positive");
  if (threads < 0) throw ConfigError("threads must be non-negative");
  if (bai) {
    BaiBoundParams p = *bai;
    p.v = stieltjes_v.at(n_list.front());
    try {
      p.validate();
    } catch (const InvalidParams& e) {
      throw ConfigError(std::string("bai: ") + e.what());
    }
  }
}

SweepConfig parse_config(std::istream& in) {
  SweepConfig cfg;
  BaiBoundParams bai;
  bool bai_on = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "ensemble") {
      try {
        cfg.ensemble.kind = parse_entry_law(value);
      } catch (const InvalidSpec& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "sigma") {
      cfg.ensemble.sigma = parse_number<double>(key, value);
    } else if (key == "tail_index") {
      cfg.ensemble.tail_index = parse_number<double>(key, value);
    } else if (key == "test_mode") {
      cfg.ensemble.allow_degenerate = parse_bool(key, value);
    } else if (key == "n_list") {
      cfg.n_list.clear();
      for (const auto& item : split(value, ',')) cfg.n_list.push_back(parse_number<int>(key, item));
    } else if (key == "reps") {
      cfg.reps = parse_number<int>(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "pipeline") {
      if (value == "raw") {
        cfg.pipeline = Pipeline::raw;
      } else if (value == "truncated") {
        cfg.pipeline = Pipeline::truncated;
      } else {
        throw ConfigError("pipeline: expected raw or truncated");
      }
    } else if (key == "distances") {
      cfg.levy = false;
      for (const auto& item : split(value, ',')) {
        if (item == "levy") {
          cfg.levy = true;
        } else if (item != "kolmogorov") {
          throw ConfigError("distances: unknown distance '" + item + "'");
        }
      }
    } else if (key == "stieltjes_v") {
      cfg.stieltjes_v = parse_rule(value);
    } else if (key == "bai") {
      bai_on = parse_bool(key, value);
    } else if (key == "bai_A") {
      bai.A = parse_number<double>(key, value);
    } else if (key == "bai_B") {
      bai.B = parse_number<double>(key, value);
    } else if (key == "bai_a") {
      bai.a = parse_number<double>(key, value);
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else if (key == "csv") {
      cfg.csv_name = value;
    } else if (key == "json") {
      cfg.json_name = value;
    } else if (key == "tsv") {
      cfg.tsv_name = value;
    } else if (key == "timing") {
      cfg.timing = parse_bool(key, value);
    } else if (key == "threads") {
      cfg.threads = parse_number<int>(key, value);
    } else {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (bai_on) cfg.bai = bai;
  cfg.validate();
  return cfg;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  return parse_config(in);
}

}  // namespace qrmt

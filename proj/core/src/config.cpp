#include "qkdfs/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace qkdfs {

std::vector<double> SweepGrid::points() const {
  if (!(step_km > 0.0)) throw std::invalid_argument("sweep step must be > 0");
  if (stop_km < start_km) {
    throw std::invalid_argument("sweep stop must be >= start");
  }
  std::vector<double> out;
  // i-based stepping avoids accumulation drift; half-step slack keeps the
  // endpoint when start + n*step lands on it in floating point.
  for (int i = 0;; ++i) {
    double l = start_km + i * step_km;
    if (l > stop_km + 0.5 * step_km) break;
    out.push_back(std::min(l, stop_km));
    if (l >= stop_km) break;
  }
  return out;
}

std::string to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::Text: return "text";
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
  }
  return "?";
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_double(const std::string& origin, int line,
                    const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(origin, line, "expected a number, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& origin, int line,
                        const std::string& value) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(origin, line,
                      "expected an unsigned integer, got '" + value + "'");
  }
  return v;
}

struct SourceDraft {
  bool present = false;
  double mean = 0.0;
};

}  // namespace

RunConfig parse_config(std::string_view text, const std::string& origin) {
  RunConfig cfg;
  std::map<SourceLabel, SourceDraft> sources;
  std::map<SourceLabel, double> mix;
  std::map<SourceLabel, double> budgets;
  bool strategy_named_honest = false;

  std::istringstream stream{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin, line_no, "expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(origin, line_no, "expected 'key = value'");
    }

    auto num = [&] { return parse_double(origin, line_no, value); };
    auto u64 = [&] { return parse_u64(origin, line_no, value); };

    if (key == "channel.alpha_db_per_km") {
      cfg.system.channel.alpha_db_per_km = num();
    } else if (key == "channel.length_km") {
      cfg.system.channel.length_km = num();
    } else if (key == "detector.eta_bob") {
      cfg.system.detector.eta_bob = num();
    } else if (key == "detector.dark_count") {
      cfg.system.detector.dark_count = num();
    } else if (key == "detector.misalignment") {
      cfg.system.detector.misalignment = num();
    } else if (key.starts_with("source.") &&
               key.ends_with(".mean_photons")) {
      std::string name = key.substr(7, key.size() - 7 - 13);
      auto label = parse_source_label(name);
      if (!label) throw ConfigError(origin, line_no, "unknown source '" + name + "'");
      sources[*label] = SourceDraft{true, num()};
    } else if (key == "session.pulse_count") {
      cfg.session.pulse_count = num();
    } else if (key == "session.confidence_exponent") {
      cfg.session.confidence_exponent = num();
    } else if (key.starts_with("session.pulse_count.")) {
      std::string name = key.substr(20);
      auto label = parse_source_label(name);
      if (!label) throw ConfigError(origin, line_no, "unknown source '" + name + "'");
      budgets[*label] = num();
    } else if (key == "attack.strategy") {
      if (value == "honest") {
        strategy_named_honest = true;
      } else if (value == "naive_global" || value == "naive") {
        cfg.strategy.variant = AttackVariant::NaiveGlobal;
        cfg.strategy_set = true;
      } else if (value == "pnr") {
        cfg.strategy.variant = AttackVariant::PhotonNumberResolving;
        cfg.strategy_set = true;
      } else if (value == "vacuum_split") {
        cfg.strategy.variant = AttackVariant::VacuumSplit;
        cfg.strategy_set = true;
      } else if (value == "intercept") {
        cfg.strategy.variant = AttackVariant::InterceptAtDistance;
        cfg.strategy_set = true;
      } else {
        throw ConfigError(origin, line_no,
                          "unknown strategy '" + value +
                              "' (honest, naive_global, pnr, vacuum_split, "
                              "intercept)");
      }
    } else if (key == "attack.resend_prob") {
      cfg.strategy.resend_prob = num();
    } else if (key == "attack.flip_prob") {
      cfg.strategy.flip_prob = num();
    } else if (key == "attack.intercept_km") {
      cfg.strategy.intercept_km = num();
    } else if (key == "sweep.start_km") {
      cfg.sweep.start_km = num();
      cfg.sweep_set = true;
    } else if (key == "sweep.stop_km") {
      cfg.sweep.stop_km = num();
      cfg.sweep_set = true;
    } else if (key == "sweep.step_km") {
      cfg.sweep.step_km = num();
      cfg.sweep_set = true;
    } else if (key == "mc.pulses") {
      cfg.trial.pulses = u64();
    } else if (key == "mc.seed") {
      cfg.trial.seed = u64();
    } else if (key == "mc.workers") {
      cfg.trial.workers = static_cast<int>(u64());
    } else if (key.starts_with("mc.mix.")) {
      std::string name = key.substr(7);
      auto label = parse_source_label(name);
      if (!label) throw ConfigError(origin, line_no, "unknown source '" + name + "'");
      mix[*label] = num();
    } else if (key == "mc.fluct_trials") {
      cfg.fluct_trials = u64();
    } else if (key == "mc.fluct_pulses") {
      cfg.fluct_pulses = u64();
    } else if (key == "output.format") {
      if (value == "text") {
        cfg.format = OutputFormat::Text;
      } else if (value == "csv") {
        cfg.format = OutputFormat::Csv;
      } else if (value == "json") {
        cfg.format = OutputFormat::Json;
      } else {
        throw ConfigError(origin, line_no,
                          "unknown format '" + value + "' (text, csv, json)");
      }
    } else if (key == "output.path") {
      cfg.out_path = value == "-" ? "" : value;
    } else {
      throw ConfigError(origin, line_no, "unknown key '" + key + "'");
    }
  }

  // Assemble sources in the fixed signal, decoy, vacuum order.
  for (SourceLabel label :
       {SourceLabel::Signal, SourceLabel::Decoy, SourceLabel::Vacuum}) {
    auto it = sources.find(label);
    if (it != sources.end() && it->second.present) {
      cfg.system.sources.push_back(SourceSpec{label, it->second.mean});
    }
  }
  for (const auto& [label, n] : budgets) {
    cfg.session.per_source_pulses.emplace_back(label, n);
  }
  for (const auto& [label, fraction] : mix) {
    cfg.trial.source_mix.emplace_back(label, fraction);
  }
  cfg.mc_honest = strategy_named_honest || !cfg.strategy_set;

  try {
    validate(cfg.system);
    validate(cfg.session);
    validate(cfg.trial, cfg.system);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(origin, line_no, err.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(path, 0, "cannot open config file");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

SweepGrid parse_grid_spec(const std::string& spec) {
  SweepGrid grid;
  std::size_t a = spec.find(':');
  std::size_t b = a == std::string::npos ? a : spec.find(':', a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    throw std::invalid_argument("grid spec must be start:stop:step");
  }
  try {
    grid.start_km = std::stod(spec.substr(0, a));
    grid.stop_km = std::stod(spec.substr(a + 1, b - a - 1));
    grid.step_km = std::stod(spec.substr(b + 1));
  } catch (const std::exception&) {
    throw std::invalid_argument("grid spec must be start:stop:step");
  }
  (void)grid.points();  // validates ranges
  return grid;
}

}  // namespace qkdfs

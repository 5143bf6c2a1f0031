#include "oamsim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "oamsim/errors.hpp"

namespace oamsim {

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct KeyValue {
  std::string value;
  int line = 0;
  bool consumed = false;
};

// sections -> key -> value
using RawConfig = std::map<std::string, std::map<std::string, KeyValue>>;

RawConfig parse_raw(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigParseError("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw ConfigParseError("line " + std::to_string(lineno) + ": empty section name");
      raw[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigParseError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigParseError("line " + std::to_string(lineno) + ": key outside any [section]");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty())
      throw ConfigParseError("line " + std::to_string(lineno) + ": empty key");
    raw[section][key] = {trim(t.substr(eq + 1)), lineno, false};
  }
  return raw;
}

class Reader {
 public:
  explicit Reader(RawConfig raw) : raw_(std::move(raw)) {}

  bool has(const std::string& section, const std::string& key) {
    auto s = raw_.find(section);
    return s != raw_.end() && s->second.count(key) > 0;
  }

  template <typename Fn>
  void with(const std::string& section, const std::string& key, Fn&& fn) {
    auto s = raw_.find(section);
    if (s == raw_.end()) return;
    auto k = s->second.find(key);
    if (k == s->second.end()) return;
    k->second.consumed = true;
    fn(k->second.value, k->second.line);
  }

  void number(const std::string& section, const std::string& key, double& out) {
    with(section, key, [&](const std::string& v, int line) { out = parse_number(v, line); });
  }
  void integer(const std::string& section, const std::string& key, int& out) {
    with(section, key, [&](const std::string& v, int line) {
      const double d = parse_number(v, line);
      if (d != std::floor(d))
        throw ConfigParseError("line " + std::to_string(line) + ": expected an integer");
      out = static_cast<int>(d);
    });
  }
  void unsigned64(const std::string& section, const std::string& key, std::uint64_t& out) {
    with(section, key, [&](const std::string& v, int line) {
      const double d = parse_number(v, line);
      if (d < 0 || d != std::floor(d))
        throw ConfigParseError("line " + std::to_string(line) +
                               ": expected a nonnegative integer");
      out = static_cast<std::uint64_t>(d);
    });
  }
  void text(const std::string& section, const std::string& key, std::string& out) {
    with(section, key, [&](const std::string& v, int) { out = v; });
  }
  template <std::size_t N>
  void number_list(const std::string& section, const std::string& key,
                   std::array<double, N>& out) {
    with(section, key, [&](const std::string& v, int line) {
      const auto items = split_list(v);
      if (items.size() != N)
        throw ConfigParseError("line " + std::to_string(line) + ": expected " +
                               std::to_string(N) + " comma-separated values, got " +
                               std::to_string(items.size()));
      for (std::size_t i = 0; i < N; ++i) out[i] = parse_number(items[i], line);
    });
  }

  void reject_unconsumed() const {
    for (const auto& [section, keys] : raw_)
      for (const auto& [key, kv] : keys)
        if (!kv.consumed)
          throw ConfigParseError("line " + std::to_string(kv.line) + ": unknown key [" +
                                 section + "] " + key);
  }

  const RawConfig& raw() const { return raw_; }

 private:
  static std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
      const auto comma = v.find(',', pos);
      out.push_back(trim(v.substr(pos, comma == std::string::npos ? comma : comma - pos)));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return out;
  }

  static double parse_number(const std::string& v, int line) {
    double d = 0.0;
    const char* begin = v.data();
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(begin, end, d);
    if (ec != std::errc{} || ptr != end)
      throw ConfigParseError("line " + std::to_string(line) + ": not a number: '" + v + "'");
    return d;
  }

  RawConfig raw_;
};

void read_spectrum_overrides(Reader& reader, EmitterParams& emitter) {
  // keys spectrum_<l> (l in -6..6), 15 weights over masks -7..7
  for (int l = kBasisMin; l <= kBasisMax; ++l) {
    const std::string key = "spectrum_" + std::to_string(l);
    if (!reader.has("emitter", key)) continue;
    ChargeSpectrum s{};
    reader.number_list("emitter", key, s);
    emitter.spectrum_overrides[l] = s;
  }
}

}  // namespace

void SourceParams::validate() const {
  if (!(mu >= 0.0)) throw ValidationError("source: violated invariant: mu >= 0");
}

void AnalysisParams::validate() const {
  if (!(bin_width_ps > 0.0))
    throw ValidationError("analysis: violated invariant: bin_width_ps > 0");
  if (!(window_ps >= bin_width_ps))
    throw ValidationError("analysis: violated invariant: window_ps >= bin_width_ps");
  const double bins = window_ps / bin_width_ps;
  if (std::abs(bins - std::round(bins)) > 1e-9 || std::llround(bins) % 2 == 0)
    throw ValidationError(
        "analysis: violated invariant: window_ps spans an odd number of bins");
  if (!(span_ps > window_ps))
    throw ValidationError("analysis: violated invariant: span_ps > window_ps");
  if (acc_side_peaks <= 0 || acc_side_peaks % 2 != 0)
    throw ValidationError("analysis: violated invariant: acc_side_peaks positive and even");
}

void RunParams::validate() const {
  if (!(lambda_s_pos_nm > 0.0 && lambda_s_neg_nm > 0.0))
    throw ValidationError("run: violated invariant: signal wavelengths > 0");
  if (block_size == 0) throw ValidationError("run: violated invariant: block_size > 0");
  if (!(raman_guard_linewidths > 0.0))
    throw ValidationError("run: violated invariant: raman_guard_linewidths > 0");
}

void CalibrationTargets::validate() const {
  if (!(cc > 0.0)) throw ValidationError("calibrate: violated invariant: cc > 0");
  if (!(car_min > 1.0 && car_max >= car_min))
    throw ValidationError("calibrate: violated invariant: 1 < car_min <= car_max");
  if (!(anchor_voltage_v > 0.0))
    throw ValidationError("calibrate: violated invariant: anchor_voltage_v > 0");
}

void ExperimentConfig::validate() const {
  pump.validate();
  source.validate();
  resonator.validate();
  emitter.validate();
  loss.validate();
  spad_signal.validate();
  spad_idler.validate();
  analysis.validate();
  run.validate();
  targets.validate();
  // the ACC span must cover acc_side_peaks/2 pulse periods plus a window
  const double needed =
      (analysis.acc_side_peaks / 2) * pump.period_ps() + analysis.window_ps;
  if (analysis.span_ps < needed)
    throw ValidationError("analysis: violated invariant: span_ps covers +-" +
                          std::to_string(analysis.acc_side_peaks / 2) + " pulse periods (needs " +
                          format_double(needed) + " ps)");
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  auto kv = [&](const char* key, double v) { out << key << " = " << format_double(v) << "\n"; };
  auto kvi = [&](const char* key, long long v) { out << key << " = " << v << "\n"; };

  out << "[pump]\n";
  kv("lambda_p_nm", pump.lambda_p_nm);
  kv("rep_rate_hz", pump.rep_rate_hz);
  kv("duration_s", pump.duration_s);

  out << "\n[source]\n";
  kv("mu", source.mu);
  out << "pair_law = " << (source.law == PairNumberLaw::poisson ? "poisson" : "thermal") << "\n";

  out << "\n[resonator]\n";
  kv("fsr_nm", resonator.fsr_nm);
  kv("fwhm_nm", resonator.fwhm_nm);
  kv("lambda_ref_nm", resonator.lambda_ref_nm);
  kvi("order_ref", resonator.order_ref);
  kv("dip_depth", resonator.dip_depth);
  kv("thermo_slope_nm_per_mw", resonator.thermo_slope_nm_per_mw);
  kv("heater_ohms", resonator.heater_ohms);
  kvi("n_waveguides", resonator.n_waveguides);
  kvi("charge_offset", resonator.charge_offset);
  kv("band_min_nm", resonator.band_min_nm);
  kv("band_max_nm", resonator.band_max_nm);

  out << "\n[emitter]\n";
  kv("per_waveguide_coupling", emitter.per_waveguide_coupling);
  out << "efficiency_table =";
  for (std::size_t i = 0; i < emitter.efficiency_by_abs_charge.size(); ++i)
    out << (i ? ", " : " ") << format_double(emitter.efficiency_by_abs_charge[i]);
  out << "\n";
  kv("purity_target", emitter.purity_target);
  for (const auto& [l, s] : emitter.spectrum_overrides) {
    out << "spectrum_" << l << " =";
    for (std::size_t i = 0; i < s.size(); ++i) out << (i ? ", " : " ") << format_double(s[i]);
    out << "\n";
  }

  out << "\n[loss]\n";
  kv("coupling_in_db", loss.coupling_in_db);
  kv("sww_db", loss.sww_db);
  out << "signal_path_db =";
  for (std::size_t i = 0; i < loss.signal_path_db_by_abs_charge.size(); ++i)
    out << (i ? ", " : " ") << format_double(loss.signal_path_db_by_abs_charge[i]);
  out << "\n";
  kv("idler_arm_db", loss.idler_arm_db);
  kv("objective_coupling", loss.objective_coupling);

  auto spad = [&](const char* section, const SpadParams& p) {
    out << "\n[" << section << "]\n";
    kv("det_efficiency", p.det_efficiency);
    kv("dark_prob_per_gate", p.dark_prob_per_gate);
    kv("jitter_sigma_ps", p.jitter_sigma_ps);
  };
  spad("spad_signal", spad_signal);
  spad("spad_idler", spad_idler);

  out << "\n[analysis]\n";
  kv("bin_width_ps", analysis.bin_width_ps);
  kv("window_ps", analysis.window_ps);
  kv("span_ps", analysis.span_ps);
  kvi("acc_side_peaks", analysis.acc_side_peaks);

  out << "\n[run]\n";
  kv("lambda_s_pos_nm", run.lambda_s_pos_nm);
  kv("lambda_s_neg_nm", run.lambda_s_neg_nm);
  kvi("block_size", static_cast<long long>(run.block_size));
  kv("raman_guard_linewidths", run.raman_guard_linewidths);

  out << "\n[targets]\n";
  kv("cc", targets.cc);
  kv("car_min", targets.car_min);
  kv("car_max", targets.car_max);
  kv("anchor_voltage_v", targets.anchor_voltage_v);
  kvi("anchor_charge", targets.anchor_charge);
  kv("anchor_lambda_nm", targets.anchor_lambda_nm);
  return out.str();
}

std::string ExperimentConfig::hash() const {
  const std::string text = serialize();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) buf[i] = hex[(h >> (60 - 4 * i)) & 0xf];
  buf[16] = '\0';
  return std::string(buf);
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  Reader reader(parse_raw(text));
  ExperimentConfig cfg;  // defaults

  reader.number("pump", "lambda_p_nm", cfg.pump.lambda_p_nm);
  reader.number("pump", "rep_rate_hz", cfg.pump.rep_rate_hz);
  reader.number("pump", "duration_s", cfg.pump.duration_s);

  reader.number("source", "mu", cfg.source.mu);
  reader.with("source", "pair_law", [&](const std::string& v, int line) {
    if (v == "poisson")
      cfg.source.law = PairNumberLaw::poisson;
    else if (v == "thermal")
      cfg.source.law = PairNumberLaw::thermal;
    else
      throw ConfigParseError("line " + std::to_string(line) +
                             ": pair_law must be poisson or thermal");
  });

  reader.number("resonator", "fsr_nm", cfg.resonator.fsr_nm);
  reader.number("resonator", "fwhm_nm", cfg.resonator.fwhm_nm);
  reader.number("resonator", "lambda_ref_nm", cfg.resonator.lambda_ref_nm);
  reader.integer("resonator", "order_ref", cfg.resonator.order_ref);
  reader.number("resonator", "dip_depth", cfg.resonator.dip_depth);
  reader.number("resonator", "thermo_slope_nm_per_mw", cfg.resonator.thermo_slope_nm_per_mw);
  reader.number("resonator", "heater_ohms", cfg.resonator.heater_ohms);
  reader.integer("resonator", "n_waveguides", cfg.resonator.n_waveguides);
  reader.integer("resonator", "charge_offset", cfg.resonator.charge_offset);
  reader.number("resonator", "band_min_nm", cfg.resonator.band_min_nm);
  reader.number("resonator", "band_max_nm", cfg.resonator.band_max_nm);

  reader.number("emitter", "per_waveguide_coupling", cfg.emitter.per_waveguide_coupling);
  reader.number_list("emitter", "efficiency_table", cfg.emitter.efficiency_by_abs_charge);
  reader.number("emitter", "purity_target", cfg.emitter.purity_target);
  read_spectrum_overrides(reader, cfg.emitter);

  reader.number("loss", "coupling_in_db", cfg.loss.coupling_in_db);
  reader.number("loss", "sww_db", cfg.loss.sww_db);
  reader.number_list("loss", "signal_path_db", cfg.loss.signal_path_db_by_abs_charge);
  reader.number("loss", "idler_arm_db", cfg.loss.idler_arm_db);
  reader.number("loss", "objective_coupling", cfg.loss.objective_coupling);

  auto spad = [&](const char* section, SpadParams& p) {
    reader.number(section, "det_efficiency", p.det_efficiency);
    reader.number(section, "dark_prob_per_gate", p.dark_prob_per_gate);
    reader.number(section, "jitter_sigma_ps", p.jitter_sigma_ps);
  };
  spad("spad_signal", cfg.spad_signal);
  spad("spad_idler", cfg.spad_idler);

  reader.number("analysis", "bin_width_ps", cfg.analysis.bin_width_ps);
  reader.number("analysis", "window_ps", cfg.analysis.window_ps);
  reader.number("analysis", "span_ps", cfg.analysis.span_ps);
  reader.integer("analysis", "acc_side_peaks", cfg.analysis.acc_side_peaks);

  reader.number("run", "lambda_s_pos_nm", cfg.run.lambda_s_pos_nm);
  reader.number("run", "lambda_s_neg_nm", cfg.run.lambda_s_neg_nm);
  reader.unsigned64("run", "block_size", cfg.run.block_size);
  reader.number("run", "raman_guard_linewidths", cfg.run.raman_guard_linewidths);

  reader.number("targets", "cc", cfg.targets.cc);
  reader.number("targets", "car_min", cfg.targets.car_min);
  reader.number("targets", "car_max", cfg.targets.car_max);
  reader.number("targets", "anchor_voltage_v", cfg.targets.anchor_voltage_v);
  reader.integer("targets", "anchor_charge", cfg.targets.anchor_charge);
  reader.number("targets", "anchor_lambda_nm", cfg.targets.anchor_lambda_nm);

  reader.reject_unconsumed();
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return from_string(text.str());
}

}  // namespace oamsim

#include "sdbp/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "sdbp/units.hpp"

namespace sdbp {
namespace {

struct Value {
  enum class Type { boolean, number, text, list } type = Type::text;
  bool b = false;
  double num = 0.0;
  std::string text;
  std::vector<Value> list;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_number(const std::string& s, double* out) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') return false;
  *out = v;
  return true;
}

Value parse_scalar(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  Value v;
  if (s == "true" || s == "false") {
    v.type = Value::Type::boolean;
    v.b = s == "true";
    return v;
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    v.type = Value::Type::text;
    v.text = s.substr(1, s.size() - 2);
    return v;
  }
  if (parse_number(s, &v.num)) {
    v.type = Value::Type::number;
    return v;
  }
  throw ConfigError(key + ": cannot parse value '" + s + "'");
}

Value parse_value(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw ConfigError(key + ": unterminated list");
    Value v;
    v.type = Value::Type::list;
    std::string inner = s.substr(1, s.size() - 2);
    std::string item;
    bool in_quotes = false;
    for (char ch : inner) {
      if (ch == '"') in_quotes = !in_quotes;
      if (ch == ',' && !in_quotes) {
        if (!trim(item).empty()) v.list.push_back(parse_scalar(item, key));
        item.clear();
      } else {
        item += ch;
      }
    }
    if (!trim(item).empty()) v.list.push_back(parse_scalar(item, key));
    return v;
  }
  return parse_scalar(s, key);
}

struct Unit {
  const char* suffix;
  double scale;
};

// Strict "<number> <unit>" parsing; the unit must match one of the accepted
// spellings exactly. Guards against the classic ps/nm/km bookkeeping slips.
double parse_quantity(const Value& v, const std::string& key,
                      std::initializer_list<Unit> units) {
  if (v.type != Value::Type::text)
    throw ConfigError(key + ": expected a quoted quantity like \"80 km\"");
  const std::string s = trim(v.text);
  const auto space = s.find_first_of(" \t");
  if (space == std::string::npos)
    throw ConfigError(key + ": missing unit in '" + s + "'");
  double num = 0.0;
  if (!parse_number(trim(s.substr(0, space)), &num))
    throw ConfigError(key + ": bad number in '" + s + "'");
  const std::string unit = trim(s.substr(space));
  for (const Unit& u : units)
    if (unit == u.suffix) return num * u.scale;
  std::string expected;
  for (const Unit& u : units) {
    if (!expected.empty()) expected += ", ";
    expected += u.suffix;
  }
  throw ConfigError(key + ": unknown unit '" + unit + "' (expected one of: " +
                    expected + ")");
}

constexpr std::initializer_list<Unit> kRateUnits = {
    {"Bd", 1.0}, {"baud", 1.0}, {"kBd", 1e3}, {"MBd", 1e6},
    {"GBd", 1e9}, {"Gbaud", 1e9}};
constexpr std::initializer_list<Unit> kLengthKmUnits = {{"km", 1.0}, {"m", 1e-3}};
constexpr std::initializer_list<Unit> kDbUnits = {{"dB", 1.0}};
constexpr std::initializer_list<Unit> kDbmUnits = {{"dBm", 1.0}};
constexpr std::initializer_list<Unit> kNmUnits = {{"nm", 1.0}, {"um", 1e3}};
constexpr std::initializer_list<Unit> kDispersionUnits = {
    {"ps/nm/km", 1.0}, {"ps/(nm km)", 1.0}, {"ps/(nm·km)", 1.0}};
constexpr std::initializer_list<Unit> kGammaUnits = {
    {"/W/km", 1.0}, {"1/W/km", 1.0}, {"1/(W km)", 1.0}, {"(W km)^-1", 1.0}};
constexpr std::initializer_list<Unit> kAttenUnits = {{"dB/km", 1.0}};

// Typed access to the parsed key/value map; every key must be consumed.
class Reader {
 public:
  explicit Reader(std::map<std::string, Value> values)
      : values_(std::move(values)) {
    for (const auto& [k, v] : values_) remaining_.insert(k);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  double quantity(const std::string& key, std::initializer_list<Unit> units,
                  double fallback) {
    const Value* v = take(key);
    return v ? parse_quantity(*v, key, units) : fallback;
  }

  double quantity_required(const std::string& key,
                           std::initializer_list<Unit> units) {
    const Value* v = take(key);
    if (!v) throw ConfigError(key + ": required key is missing");
    return parse_quantity(*v, key, units);
  }

  double number(const std::string& key, double fallback) {
    const Value* v = take(key);
    if (!v) return fallback;
    if (v->type != Value::Type::number)
      throw ConfigError(key + ": expected a number");
    return v->num;
  }

  long long integer(const std::string& key, long long fallback) {
    const double d = number(key, static_cast<double>(fallback));
    const long long i = static_cast<long long>(d);
    if (static_cast<double>(i) != d)
      throw ConfigError(key + ": expected an integer");
    return i;
  }

  long long integer_required(const std::string& key) {
    if (!has(key)) throw ConfigError(key + ": required key is missing");
    return integer(key, 0);
  }

  bool boolean(const std::string& key, bool fallback) {
    const Value* v = take(key);
    if (!v) return fallback;
    if (v->type != Value::Type::boolean)
      throw ConfigError(key + ": expected true or false");
    return v->b;
  }

  std::string text_required(const std::string& key) {
    const Value* v = take(key);
    if (!v) throw ConfigError(key + ": required key is missing");
    if (v->type != Value::Type::text)
      throw ConfigError(key + ": expected a quoted string");
    return v->text;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const Value* v = take(key);
    if (!v) return fallback;
    if (v->type != Value::Type::text)
      throw ConfigError(key + ": expected a quoted string");
    return v->text;
  }

  std::vector<Value> list_required(const std::string& key) {
    const Value* v = take(key);
    if (!v) throw ConfigError(key + ": required key is missing");
    if (v->type != Value::Type::list)
      throw ConfigError(key + ": expected a [ ... ] list");
    if (v->list.empty()) throw ConfigError(key + ": list must not be empty");
    return v->list;
  }

  void finish() const {
    if (!remaining_.empty()) {
      std::string keys;
      for (const auto& k : remaining_) {
        if (!keys.empty()) keys += ", ";
        keys += k;
      }
      throw ConfigError("unknown key(s): " + keys);
    }
  }

 private:
  const Value* take(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return nullptr;
    remaining_.erase(key);
    return &it->second;
  }

  std::map<std::string, Value> values_;
  std::set<std::string> remaining_;
};

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  std::map<std::string, Value> values;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // '#' inside quotes is content, not a comment.
    std::size_t cut = std::string::npos;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_quotes = !in_quotes;
      if (line[i] == '#' && !in_quotes) {
        cut = i;
        break;
      }
    }
    std::string body = trim(cut == std::string::npos ? line : line.substr(0, cut));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    if (key.empty() ||
        key.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789_.") !=
            std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": bad key '" + key + "'");
    if (values.count(key))
      throw ConfigError(key + ": duplicate key");
    values.emplace(key, parse_value(body.substr(eq + 1), key));
  }

  Reader r(std::move(values));
  RunConfig cfg;
  ExperimentSpec& spec = cfg.spec;

  spec.constellation = r.text_required("constellation");
  spec.link.symbol_rate_baud = r.quantity_required("symbol_rate", kRateUnits);
  spec.block_symbols = static_cast<std::size_t>(r.integer_required("block_symbols"));
  spec.blocks = static_cast<std::size_t>(r.integer_required("blocks"));
  spec.n_particles = static_cast<std::size_t>(r.integer("particles", 500));
  spec.master_seed = static_cast<std::uint64_t>(r.integer("master_seed", 1));

  for (const Value& v : r.list_required("power_sweep"))
    spec.power_sweep_dbm.push_back(parse_quantity(v, "power_sweep", kDbmUnits));
  for (const Value& v : r.list_required("detectors")) {
    if (v.type != Value::Type::text)
      throw ConfigError("detectors: entries must be quoted strings");
    try {
      spec.detectors.push_back(DetectorSpec::parse(v.text));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("detectors: ") + e.what());
    }
  }

  spec.link.spans = static_cast<int>(r.integer_required("link.spans"));
  spec.link.smf.length_km = r.quantity_required("link.span_length", kLengthKmUnits);
  spec.link.smf.dispersion_ps_nm_km =
      r.quantity("link.dispersion", kDispersionUnits, 16.0);
  spec.link.smf.gamma_per_w_km = r.quantity("link.gamma", kGammaUnits, 1.3);
  spec.link.smf.attenuation_db_km =
      r.quantity("link.attenuation", kAttenUnits, 0.2);
  spec.link.smf.wavelength_nm = r.quantity("link.wavelength", kNmUnits, 1550.0);
  spec.link.noise_figure_db = r.quantity("link.noise_figure", kDbUnits, 5.0);
  spec.link.step_epsilon = r.number("link.step_epsilon", 1e-4);
  spec.link.ase_enabled = r.boolean("link.ase", true);
  const bool dm = r.boolean("link.dcm", true);
  const double il = r.quantity("link.dcm_insertion_loss", kDbUnits, 3.0);
  spec.link.dcm_power_backoff_db =
      r.quantity("link.dcm_power_backoff", kDbUnits, 4.0);
  if (dm) spec.link.dcm = DcmParams{il};

  spec.rrc_rolloff = r.number("rrc.rolloff", 0.25);
  spec.rrc_span_symbols = static_cast<int>(r.integer("rrc.span_symbols", 16));

  spec.samples_per_symbol =
      static_cast<int>(r.integer("engine.samples_per_symbol", 4));
  spec.link.manakov_factor = r.number("engine.manakov_factor", 8.0 / 9.0);
  spec.workers = static_cast<int>(r.integer("engine.workers", 0));
  spec.state_budget =
      static_cast<std::size_t>(r.integer("engine.state_budget", 1'000'000));
  spec.metric.include_logdet = r.boolean("engine.logdet_term", true);

  cfg.output_dir = r.text("output.dir", "results");
  cfg.resume = r.boolean("output.resume", false);

  r.finish();
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string serialize_config(const RunConfig& cfg) {
  const ExperimentSpec& s = cfg.spec;
  std::ostringstream out;
  out << "constellation = \"" << s.constellation << "\"\n";
  out << "symbol_rate = \"" << fmt(s.link.symbol_rate_baud) << " Bd\"\n";
  out << "block_symbols = " << s.block_symbols << "\n";
  out << "blocks = " << s.blocks << "\n";
  out << "particles = " << s.n_particles << "\n";
  out << "master_seed = " << s.master_seed << "\n";
  out << "power_sweep = [";
  for (std::size_t i = 0; i < s.power_sweep_dbm.size(); ++i)
    out << (i ? ", " : "") << '"' << fmt(s.power_sweep_dbm[i]) << " dBm\"";
  out << "]\n";
  out << "detectors = [";
  for (std::size_t i = 0; i < s.detectors.size(); ++i)
    out << (i ? ", " : "") << '"' << s.detectors[i].id() << '"';
  out << "]\n\n";

  out << "link.spans = " << s.link.spans << "\n";
  out << "link.span_length = \"" << fmt(s.link.smf.length_km) << " km\"\n";
  out << "link.dispersion = \"" << fmt(s.link.smf.dispersion_ps_nm_km)
      << " ps/nm/km\"\n";
  out << "link.gamma = \"" << fmt(s.link.smf.gamma_per_w_km) << " /W/km\"\n";
  out << "link.attenuation = \"" << fmt(s.link.smf.attenuation_db_km)
      << " dB/km\"\n";
  out << "link.wavelength = \"" << fmt(s.link.smf.wavelength_nm) << " nm\"\n";
  out << "link.noise_figure = \"" << fmt(s.link.noise_figure_db) << " dB\"\n";
  out << "link.step_epsilon = " << fmt(s.link.step_epsilon) << "\n";
  out << "link.ase = " << (s.link.ase_enabled ? "true" : "false") << "\n";
  out << "link.dcm = " << (s.link.dcm ? "true" : "false") << "\n";
  if (s.link.dcm)
    out << "link.dcm_insertion_loss = \"" << fmt(s.link.dcm->insertion_loss_db)
        << " dB\"\n";
  out << "link.dcm_power_backoff = \"" << fmt(s.link.dcm_power_backoff_db)
      << " dB\"\n\n";

  out << "rrc.rolloff = " << fmt(s.rrc_rolloff) << "\n";
  out << "rrc.span_symbols = " << s.rrc_span_symbols << "\n\n";

  out << "engine.samples_per_symbol = " << s.samples_per_symbol << "\n";
  out << "engine.manakov_factor = " << fmt(s.link.manakov_factor) << "\n";
  out << "engine.workers = " << s.workers << "\n";
  out << "engine.state_budget = " << s.state_budget << "\n";
  out << "engine.logdet_term = " << (s.metric.include_logdet ? "true" : "false")
      << "\n\n";

  out << "output.dir = \"" << cfg.output_dir << "\"\n";
  out << "output.resume = " << (cfg.resume ? "true" : "false") << "\n";
  return out.str();
}

std::string dry_run_report(const RunConfig& cfg) {
  const ExperimentSpec& s = cfg.spec;
  std::ostringstream out;
  out << "resolved configuration\n----------------------\n"
      << serialize_config(cfg) << "\n";
  out << "derived quantities\n------------------\n";
  const double loss = s.link.span_loss_db();
  out << "span loss: " << fmt(loss) << " dB\n";
  out << "EDFA1 gain: " << fmt(linear_to_db(s.link.edfa1_gain())) << " dB\n";
  if (s.link.dcm)
    out << "EDFA2 gain: " << fmt(linear_to_db(s.link.edfa2_gain())) << " dB\n";
  const Constellation c = Constellation::make(s.constellation);
  out << "constellation size |Omega| = " << c.cardinality() << "\n";
  for (const auto& d : s.detectors) {
    if (d.kind == DetectorKind::va) {
      double states = std::pow(static_cast<double>(c.cardinality()), d.memory);
      out << "trellis states for " << d.id() << ": " << fmt(states) << "\n";
    }
  }
  for (double p : s.power_sweep_dbm) {
    const StepPlan plan = make_step_plan(s.link.smf, dbm_to_watt(p),
                                         s.link.step_epsilon,
                                         1.0 / s.link.symbol_rate_baud);
    out << "P = " << fmt(p) << " dBm: " << plan.segment_lengths_km.size()
        << " SSFM segments of " << fmt(plan.segment_lengths_km.front())
        << " km\n";
  }
  out << "EDFA1 ASE power/pol: "
      << fmt(watt_to_dbm(s.link.edfa1_params().ase_power())) << " dBm\n";
  if (s.link.dcm)
    out << "EDFA2 ASE power/pol: "
        << fmt(watt_to_dbm(s.link.edfa2_params().ase_power())) << " dBm\n";
  return out.str();
}

}  // namespace sdbp

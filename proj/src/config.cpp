#include "noiseforge/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace noiseforge {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string join_errors(const std::vector<ConfigError>& errors) {
  std::string msg = "invalid experiment config:";
  for (const auto& e : errors) msg += "\n  " + e.path + ": " + e.message;
  return msg;
}

// Collects violations with dotted locators while walking the document.
struct Checker {
  std::vector<ConfigError> errors;

  void fail(const std::string& path, const std::string& message) {
    errors.push_back({path, message});
  }

  bool require(bool ok, const std::string& path, const std::string& message) {
    if (!ok) fail(path, message);
    return ok;
  }

  double number(const json& j, const std::string& path, double fallback,
                bool required = false) {
    if (!j.contains(last_key(path))) {
      if (required) fail(path, "missing required key");
      return fallback;
    }
    const json& v = j.at(last_key(path));
    if (!v.is_number()) {
      fail(path, "expected a number");
      return fallback;
    }
    return v.get<double>();
  }

  static std::string last_key(const std::string& path) {
    const auto pos = path.find_last_of('.');
    return pos == std::string::npos ? path : path.substr(pos + 1);
  }
};

std::vector<int> parse_subgroup(Checker& chk, const json& j, const std::string& path) {
  std::vector<int> subgroup;
  if (!j.is_array() || j.empty() || j.size() > 3) {
    chk.fail(path, "subgroup must be an array of 1..3 qubit indices");
    return subgroup;
  }
  for (const auto& v : j) {
    if (!v.is_number_integer()) {
      chk.fail(path, "subgroup entries must be integers");
      return {};
    }
    subgroup.push_back(v.get<int>());
  }
  return subgroup;
}

PauliChannel parse_channel_entry(Checker& chk, const json& j, const std::string& path,
                                 const std::string& base_dir, bool& ok) {
  ok = false;
  if (j.contains("file")) {
    const std::string rel = j.at("file").get<std::string>();
    const std::filesystem::path p = std::filesystem::path(base_dir) / rel;
    if (!std::filesystem::exists(p)) {
      chk.fail(path + ".file", "referenced file does not exist: " + p.string());
      return {};
    }
    try {
      PauliChannel ch = load_channel_spec(p.string());
      ok = true;
      return ch;
    } catch (const std::exception& e) {
      chk.fail(path + ".file", e.what());
      return {};
    }
  }
  if (!j.contains("subgroup") || !j.contains("eps")) {
    chk.fail(path, "channel needs subgroup and eps (or a file reference)");
    return {};
  }
  const std::vector<int> subgroup = parse_subgroup(chk, j.at("subgroup"), path + ".subgroup");
  if (subgroup.empty()) return {};
  std::vector<std::pair<std::string, double>> eps;
  for (const auto& [label, value] : j.at("eps").items()) {
    if (!value.is_number() || value.get<double>() < 0.0 || value.get<double>() > 1.0) {
      chk.fail(path + ".eps." + label, "probability out of range");
      return {};
    }
    eps.push_back({label, value.get<double>()});
  }
  try {
    PauliChannel ch = PauliChannel::from_error_probs(subgroup, eps);
    ok = true;
    return ch;
  } catch (const std::exception& e) {
    chk.fail(path, e.what());
    return {};
  }
}

StringRateMap parse_rate_map(Checker& chk, const json& j, const std::string& path,
                             bool probabilities) {
  StringRateMap map;
  if (j.contains("subgroup")) map.subgroup = parse_subgroup(chk, j.at("subgroup"), path + ".subgroup");
  if (!j.contains("values") || !j.at("values").is_object()) {
    chk.fail(path + ".values", "expected an object of string -> value");
    return map;
  }
  for (const auto& [label, value] : j.at("values").items()) {
    if (!value.is_number()) {
      chk.fail(path + ".values." + label, "expected a number");
      continue;
    }
    const double v = value.get<double>();
    if (probabilities && !(v >= 0.0 && v <= 1.0))
      chk.fail(path + ".values." + label, "value out of [0,1]");
    if (!probabilities && v < 0.0)
      chk.fail(path + ".values." + label, "rates must be non-negative");
    if (label == "default")
      map.fallback = v;
    else
      map.values[label] = v;
  }
  return map;
}

}  // namespace

ConfigException::ConfigException(std::vector<ConfigError> errs)
    : std::runtime_error(join_errors(errs)), errors(std::move(errs)) {}

Hamiltonian HamiltonianBlock::build() const {
  if (type == "chain") {
    ChainParams p;
    p.n = n;
    p.site_energies = site_energies;
    p.couplings = couplings;
    return build_chain_hamiltonian(p);
  }
  if (type == "tfim") return build_tfim_hamiltonian(n, coupling, field);
  throw std::invalid_argument("unknown hamiltonian type: " + type);
}

std::vector<double> StringRateMap::expand(int width) const {
  const int count = 1 << (2 * width);
  std::vector<double> out(count, fallback);
  out[0] = 0.0;
  for (const auto& [label, value] : values) {
    if (static_cast<int>(label.size()) != width)
      throw std::invalid_argument("rate-map label width mismatch: " + label);
    const int idx = pauli_index_of_label(label);
    if (idx == 0) throw std::invalid_argument("identity string cannot carry a rate");
    out[idx] = value;
  }
  return out;
}

ExperimentConfig parse_config(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw ConfigException({{"$", "config file does not exist: " + path}});
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return parse_config_text(read_file(path), dir.empty() ? "." : dir);
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigException({{"$", std::string("not valid JSON: ") + e.what()}});
  }

  Checker chk;
  ExperimentConfig cfg;
  cfg.raw_json = doc.dump();

  // mode
  const std::string mode = doc.value("mode", "");
  if (mode == "characterize") cfg.mode = RunMode::Characterize;
  else if (mode == "plan") cfg.mode = RunMode::Plan;
  else if (mode == "simulate") cfg.mode = RunMode::Simulate;
  else if (mode == "mitigate") cfg.mode = RunMode::Mitigate;
  else if (mode == "cost") cfg.mode = RunMode::Cost;
  else chk.fail("mode", "must be one of characterize|plan|simulate|mitigate|cost");

  const bool needs_hamiltonian = mode != "cost";

  // hamiltonian
  if (doc.contains("hamiltonian")) {
    const json& h = doc.at("hamiltonian");
    cfg.hamiltonian.type = h.value("type", "");
    cfg.hamiltonian.n = h.value("n", 0);
    if (cfg.hamiltonian.type == "chain") {
      if (h.contains("site_energies"))
        cfg.hamiltonian.site_energies = h.at("site_energies").get<std::vector<double>>();
      if (h.contains("couplings"))
        cfg.hamiltonian.couplings = h.at("couplings").get<std::vector<double>>();
      chk.require(static_cast<int>(cfg.hamiltonian.site_energies.size()) == cfg.hamiltonian.n,
                  "hamiltonian.site_energies", "length must equal n");
      chk.require(static_cast<int>(cfg.hamiltonian.couplings.size()) == cfg.hamiltonian.n - 1,
                  "hamiltonian.couplings", "length must equal n-1");
    } else if (cfg.hamiltonian.type == "tfim") {
      cfg.hamiltonian.coupling = chk.number(h, "hamiltonian.coupling", 0.0, true);
      cfg.hamiltonian.field = chk.number(h, "hamiltonian.field", 0.0, true);
    } else {
      chk.fail("hamiltonian.type", "must be chain or tfim");
    }
    chk.require(cfg.hamiltonian.n >= 2 && cfg.hamiltonian.n <= 6, "hamiltonian.n",
                "dense simulation is capped at 2..6 qubits");
  } else if (needs_hamiltonian) {
    chk.fail("hamiltonian", "exactly one hamiltonian block is required");
  }
  const int n = cfg.hamiltonian.n;

  // device
  cfg.device.n = n;
  if (doc.contains("device")) {
    const json& d = doc.at("device");
    if (d.contains("channels")) {
      const json& list = d.at("channels");
      if (!list.is_array()) {
        chk.fail("device.channels", "expected an array");
      } else {
        for (size_t c = 0; c < list.size(); ++c) {
          bool ok = false;
          PauliChannel ch = parse_channel_entry(
              chk, list[c], "device.channels[" + std::to_string(c) + "]", base_dir, ok);
          if (ok) cfg.device.channels.push_back(std::move(ch));
        }
      }
    }
    if (d.contains("random_channels")) {
      const json& rc = d.at("random_channels");
      const double lo = chk.number(rc, "device.random_channels.low", 0.0, true);
      const double hi = chk.number(rc, "device.random_channels.high", 0.0, true);
      const uint64_t seed = rc.value("seed", 0ull);
      if (chk.require(lo >= 0.0 && hi >= lo && hi < 1.0 / 16.0, "device.random_channels",
                      "need 0 <= low <= high < 1/16") && n >= 2) {
        std::mt19937_64 rng(seed);
        for (const auto& subgroup : default_pair_tiling(n))
          cfg.device.channels.push_back(PauliChannel::random_error(subgroup, lo, hi, rng));
      }
    }
    cfg.device.coherent_theta = chk.number(d, "device.coherent_theta", 0.0);
    cfg.device.reset_error = chk.number(d, "device.reset_error", 1e-3);
    cfg.device.readout_error = chk.number(d, "device.readout_error", 0.0);
    chk.require(cfg.device.reset_error >= 0.0 && cfg.device.reset_error <= 1.0,
                "device.reset_error", "out of [0,1]");
    chk.require(cfg.device.readout_error >= 0.0 && cfg.device.readout_error <= 1.0,
                "device.readout_error", "out of [0,1]");
  }

  // trotter
  if (doc.contains("trotter")) {
    const json& t = doc.at("trotter");
    cfg.trotter_order = t.value("order", 1);
    cfg.trotter_dt = chk.number(t, "trotter.dt", 0.0);
    chk.require(cfg.trotter_order == 1 || cfg.trotter_order == 2, "trotter.order",
                "must be 1 or 2");
    chk.require(cfg.trotter_dt >= 0.0, "trotter.dt", "must be positive when given");
  }

  // pec
  if (doc.contains("pec")) {
    const json& p = doc.at("pec");
    if (p.contains("r")) {
      const double r = chk.number(p, "pec.r", 0.0);
      chk.require(r >= 0.0 && r <= 1.0, "pec.r", "mitigation factor out of [0,1]");
      cfg.pec.uniform_r = r;
    }
    if (p.contains("r_maps")) {
      const json& list = p.at("r_maps");
      for (size_t c = 0; c < list.size(); ++c)
        cfg.pec.r_maps.push_back(
            parse_rate_map(chk, list[c], "pec.r_maps[" + std::to_string(c) + "]", true));
    }
    if (p.contains("targets")) {
      const json& list = p.at("targets");
      for (size_t c = 0; c < list.size(); ++c)
        cfg.pec.target_rates.push_back(
            parse_rate_map(chk, list[c], "pec.targets[" + std::to_string(c) + "]", false));
    }
    if (p.contains("samples")) {
      if (!p.at("samples").is_number_integer() || p.at("samples").get<long>() < 0)
        chk.fail("pec.samples", "must be a non-negative integer");
      else
        cfg.pec.samples = p.at("samples").get<long>();
    }
    cfg.pec.plan_file = p.value("plan_file", "");
    if (!cfg.pec.plan_file.empty()) {
      const std::filesystem::path pp = std::filesystem::path(base_dir) / cfg.pec.plan_file;
      if (!std::filesystem::exists(pp))
        chk.fail("pec.plan_file", "referenced file does not exist: " + pp.string());
      else
        cfg.pec.plan_file = pp.string();
    }
  }

  // damping
  if (doc.contains("damping")) {
    const json& d = doc.at("damping");
    if (d.contains("rates")) {
      cfg.damping_rates = d.at("rates").get<std::vector<double>>();
      chk.require(static_cast<int>(cfg.damping_rates.size()) == n, "damping.rates",
                  "length must equal n");
      for (double g : cfg.damping_rates)
        if (g < 0.0) chk.fail("damping.rates", "rates must be non-negative");
    }
  }

  // cb
  if (doc.contains("cb")) {
    const json& c = doc.at("cb");
    if (c.contains("depths")) cfg.cb.depths = c.at("depths").get<std::vector<int>>();
    cfg.cb.shots = c.value("shots", 0l);
    cfg.cb.twirl_copies = c.value("twirl_copies", 1);
    chk.require(cfg.cb.depths.size() >= 2, "cb.depths", "need at least two depths");
    for (size_t j = 1; j < cfg.cb.depths.size(); ++j)
      if (cfg.cb.depths[j] <= cfg.cb.depths[j - 1])
        chk.fail("cb.depths", "depths must be strictly increasing");
    chk.require(cfg.cb.shots >= 0, "cb.shots", "must be non-negative");
    chk.require(cfg.cb.twirl_copies >= 1, "cb.twirl_copies", "must be positive");
  }

  // cost
  if (doc.contains("cost")) {
    const json& c = doc.at("cost");
    if (c.contains("n")) cfg.cost.qubit_counts = c.at("n").get<std::vector<int>>();
    if (c.contains("r")) cfg.cost.factors = c.at("r").get<std::vector<double>>();
    if (c.contains("depths")) cfg.cost.depths = c.at("depths").get<std::vector<int>>();
    cfg.cost.eps_per_string = chk.number(c, "cost.eps_per_string", 0.0);
    for (double r : cfg.cost.factors)
      if (!(r >= 0.0 && r <= 1.0)) chk.fail("cost.r", "mitigation factor out of [0,1]");
    for (int nn : cfg.cost.qubit_counts)
      if (nn < 2) chk.fail("cost.n", "qubit counts must be >= 2");
    for (int dd : cfg.cost.depths)
      if (dd < 1) chk.fail("cost.depths", "depths must be positive");
  } else if (cfg.mode == RunMode::Cost) {
    chk.fail("cost", "cost mode requires a cost block");
  }

  // run
  if (doc.contains("run")) {
    const json& r = doc.at("run");
    cfg.run.time = chk.number(r, "run.time", 0.0);
    if (r.contains("seed")) {
      cfg.run.seed = r.at("seed").get<uint64_t>();
      cfg.run.seed_given = true;
    }
    if (r.contains("shots")) {
      if (!r.at("shots").is_number_integer() || r.at("shots").get<long>() < 0)
        chk.fail("run.shots", "shot count must be a non-negative integer");
      else
        cfg.run.shots = r.at("shots").get<long>();
    }
    cfg.run.reference = r.value("reference", true);
    cfg.run.rk4_dt = chk.number(r, "run.rk4_dt", 0.0);
  }

  // Cross-field checks.
  const bool sampled = cfg.run.shots > 0 || (cfg.mode == RunMode::Mitigate) ||
                       (cfg.mode == RunMode::Characterize && cfg.cb.shots > 0);
  if (sampled && !cfg.run.seed_given)
    chk.fail("run.seed", "a seed is required for any sampled mode");
  if ((cfg.mode == RunMode::Simulate || cfg.mode == RunMode::Mitigate) && !(cfg.run.time > 0.0))
    chk.fail("run.time", "total time must be positive");
  if (cfg.mode == RunMode::Characterize && !(cfg.trotter_dt > 0.0))
    chk.fail("trotter.dt", "characterize mode needs an explicit time-step");

  // Feasibility of fixed-dt targets: Gamma_k <= eps_k / dt.
  if (!cfg.pec.target_rates.empty() && cfg.trotter_dt > 0.0) {
    for (size_t c = 0; c < cfg.pec.target_rates.size() && c < cfg.device.channels.size(); ++c) {
      const auto& ch = cfg.device.channels[c];
      try {
        const std::vector<double> rates = cfg.pec.target_rates[c].expand(ch.width());
        for (int k = 1; k < ch.size(); ++k) {
          if (rates[k] <= 0.0) continue;
          if (ch.prob(k) / rates[k] < cfg.trotter_dt * (1.0 - 1e-12))
            chk.fail("pec.targets[" + std::to_string(c) + "].values." +
                         pauli_label_of_index(k, ch.width()),
                     "target rate exceeds eps/dt at the fixed time-step");
        }
      } catch (const std::exception& e) {
        chk.fail("pec.targets[" + std::to_string(c) + "]", e.what());
      }
    }
  }

  if (!chk.errors.empty()) throw ConfigException(std::move(chk.errors));
  return cfg;
}

PauliChannel load_channel_spec(const std::string& path) {
  const json doc = json::parse(read_file(path));
  const std::vector<int> subgroup = doc.at("subgroup").get<std::vector<int>>();
  std::vector<std::pair<std::string, double>> eps;
  for (const auto& [label, value] : doc.at("eps").items())
    eps.push_back({label, value.get<double>()});
  return PauliChannel::from_error_probs(subgroup, eps);
}

std::string channel_spec_json(const PauliChannel& ch) {
  json doc;
  doc["subgroup"] = ch.subgroup();
  json eps = json::object();
  for (int k = 1; k < ch.size(); ++k)
    if (ch.prob(k) > 1e-12) eps[pauli_label_of_index(k, ch.width())] = ch.prob(k);
  doc["eps"] = eps;
  return doc.dump(2);
}

void save_channel_spec(const std::string& path, const PauliChannel& ch) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write channel spec: " + path);
  out << channel_spec_json(ch) << "\n";
}

void save_plan(const std::string& path, const MitigationPlan& plan) {
  json doc;
  doc["dt_max"] = plan.dt_max;
  doc["dt"] = plan.dt;
  doc["layers"] = plan.layers;
  doc["total_time"] = plan.total_time;
  doc["c_iter"] = plan.c_iter;
  doc["c_tot"] = plan.c_tot;
  json channels = json::array();
  for (const auto& cp : plan.channels) {
    json c;
    c["subgroup"] = cp.eps.subgroup();
    c["eps"] = cp.eps.probs();
    c["targets"] = cp.targets;
    c["r"] = cp.r;
    c["realized"] = cp.realized;
    c["q"] = cp.quasi.q;
    c["c_mit"] = cp.quasi.c_mit;
    channels.push_back(std::move(c));
  }
  doc["channels"] = std::move(channels);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write plan: " + path);
  out << doc.dump(2) << "\n";
}

MitigationPlan load_plan(const std::string& path) {
  const json doc = json::parse(read_file(path));
  MitigationPlan plan;
  plan.dt_max = doc.at("dt_max").get<double>();
  plan.dt = doc.at("dt").get<double>();
  plan.layers = doc.at("layers").get<int>();
  plan.total_time = doc.at("total_time").get<double>();
  plan.c_iter = doc.at("c_iter").get<double>();
  plan.c_tot = doc.at("c_tot").get<double>();
  for (const auto& c : doc.at("channels")) {
    MitigationPlan::ChannelPlan cp;
    cp.eps = PauliChannel(c.at("subgroup").get<std::vector<int>>(),
                          c.at("eps").get<std::vector<double>>());
    cp.targets = c.at("targets").get<std::vector<double>>();
    cp.r = c.at("r").get<std::vector<double>>();
    cp.realized = c.at("realized").get<std::vector<double>>();
    cp.quasi = build_quasiprobability(cp.eps, cp.r);
    plan.channels.push_back(std::move(cp));
  }
  return plan;
}

}  // namespace noiseforge

// Copyright 2026 The Eqprop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eqprop/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "eqprop/csv.hpp"

namespace eqprop {

ModelKind parse_model_kind(const std::string& name) {
  if (name == "rate") return ModelKind::kRate;
  if (name == "spiking") return ModelKind::kSpiking;
  throw ConfigError("unknown model: " + name);
}

std::string to_string(ModelKind kind) {
  return kind == ModelKind::kRate ? "rate" : "spiking";
}

void ExperimentConfig::validate() const {
  neuron.validate();
  schedule.validate();
  if (n_train_samples < 1) throw ConfigError("n_train_samples must be >= 1");
  if (eval_grid < 2) throw ConfigError("eval_grid must be >= 2");
  if (eval_every < 0) throw ConfigError("eval_every must be >= 0");
  if (eta_base < 0.0) throw ConfigError("eta_base must be >= 0");
  if (init_scale <= 0.0) throw ConfigError("init_scale must be > 0");
  if (layer_sizes.size() < 2) throw ConfigError("need at least 2 layers");
  for (int s : layer_sizes) {
    if (s < 1) throw ConfigError("layer sizes must be >= 1");
  }
  if (model == ModelKind::kRate) {
    if (layer_sizes.front() != 2 || layer_sizes.back() != 2) {
      throw ConfigError("rate model: task needs 2 input and 2 output neurons");
    }
  } else {
    if (neurons_per_dim < 1) {
      throw ConfigError("spiking model: neurons_per_dim must be >= 1");
    }
    if (layer_sizes.front() != 2 * neurons_per_dim ||
        layer_sizes.back() != 2 * neurons_per_dim) {
      throw ConfigError(
          "spiking model: input/output layers must hold 2*neurons_per_dim "
          "neurons");
    }
  }
}

PopulationCode ExperimentConfig::make_population_code() const {
  PopulationCode code;
  code.neurons_per_dim = neurons_per_dim;
  return code;
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  // Shared rate-experiment settings (dt = 1 ms, tau = 15 ms, tau_s = 10 ms,
  // tau_r = 300 ms, u_0 = 20, u_r = 0, theta = 20, u_psp = 400, R = 40,
  // delta = 5 ms, 600 ms phases, eta = 0.1/sqrt(indegree)).
  if (name == "fig3-relu" || name == "fig3-liffi" || name == "fig3-nohidden") {
    c.model = ModelKind::kRate;
    c.layer_sizes = name == "fig3-nohidden" ? std::vector<int>{2, 2}
                                            : std::vector<int>{2, 400, 2};
    c.activation = name == "fig3-liffi" ? ActivationKind::kLiffi
                                        : ActivationKind::kRelu;
    c.derivative = DerivativeMode::kSurrogate;
    c.neuron = NeuronConstants{};  // defaults are the rate-experiment values
    c.schedule = PhaseSchedule{600.0, 600.0, 1.0, 1.0};
    c.eta_base = 0.1;
    c.init_scale = 1.0;
    c.n_train_samples = 3000;
    c.eval_every = 500;
    return c;
  }
  if (name == "fig5-spiking" || name == "fig5-reduced" ||
      name == "fig5-reduced-nohidden") {
    c.model = ModelKind::kSpiking;
    c.neuron = NeuronConstants{};
    c.neuron.tau_s = 15.0;
    c.neuron.tau_r = 100.0;
    c.schedule = PhaseSchedule{1000.0, 1000.0, 1.0, 1.0};
    c.eta_base = 5e-5;
    c.update_mode = UpdateMode::kOnline;  // the spiking rule is online by nature
    if (name == "fig5-spiking") {
      c.neurons_per_dim = 20;
      c.layer_sizes = {40, 300, 40};
      c.n_train_samples = 4000;
      c.eval_every = 1000;
    } else {
      c.neurons_per_dim = 10;
      c.layer_sizes = name == "fig5-reduced" ? std::vector<int>{20, 100, 20}
                                             : std::vector<int>{20, 20};
      c.n_train_samples = 1500;
      c.eval_every = 500;
    }
    return c;
  }
  throw ConfigError("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
  return {"fig3-relu",    "fig3-liffi",  "fig3-nohidden",
          "fig5-spiking", "fig5-reduced", "fig5-reduced-nohidden"};
}

namespace {

using Section = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::map<std::string, Section> tokenize(const std::string& text) {
  std::map<std::string, Section> sections;
  std::string current;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) +
                          ": malformed section header");
      }
      current = trim(t.substr(1, t.size() - 2));
      sections[current];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    if (current.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": key outside a section");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!sections[current].emplace(key, value).second) {
      throw ConfigError("duplicate key '" + key + "' in section [" + current + "]");
    }
  }
  return sections;
}

class SectionReader {
 public:
  SectionReader(const std::string& name, const Section* section)
      : name_(name), section_(section) {}

  bool get_string(const std::string& key, std::string& out) {
    if (!section_) return false;
    const auto it = section_->find(key);
    if (it == section_->end()) return false;
    seen_.insert(key);
    out = it->second;
    return true;
  }

  template <typename T, typename Parse>
  void get(const std::string& key, T& out, Parse parse) {
    std::string raw;
    if (!get_string(key, raw)) return;
    try {
      out = parse(raw);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("[" + name_ + "] " + key + ": " + e.what());
    }
  }

  void check_unknown() const {
    if (!section_) return;
    for (const auto& [key, value] : *section_) {
      if (!seen_.count(key)) {
        throw ConfigError("unknown key '" + key + "' in section [" + name_ + "]");
      }
    }
  }

 private:
  std::string name_;
  const Section* section_;
  std::set<std::string> seen_;
};

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw ConfigError("malformed number: " + s);
  return v;
}

long parse_long(const std::string& s) {
  std::size_t pos = 0;
  const long v = std::stol(s, &pos);
  if (pos != s.size()) throw ConfigError("malformed integer: " + s);
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError("expected true/false, got: " + s);
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    out.push_back(static_cast<int>(parse_long(trim(item))));
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  const auto sections = tokenize(text);
  static const std::set<std::string> known{"experiment", "topology", "activation",
                                           "neuron",     "schedule", "learning"};
  for (const auto& [name, unused] : sections) {
    if (!known.count(name)) throw ConfigError("unknown section [" + name + "]");
  }
  const auto find = [&](const char* name) -> const Section* {
    const auto it = sections.find(name);
    return it == sections.end() ? nullptr : &it->second;
  };

  ExperimentConfig c;

  SectionReader exp("experiment", find("experiment"));
  exp.get("model", c.model, parse_model_kind);
  exp.get("seed", c.seed, [](const std::string& s) {
    return static_cast<std::uint64_t>(std::stoull(s));
  });
  exp.get("n_train_samples", c.n_train_samples, parse_long);
  exp.get("eval_every", c.eval_every,
          [](const std::string& s) { return static_cast<int>(parse_long(s)); });
  exp.get("eval_grid", c.eval_grid,
          [](const std::string& s) { return static_cast<int>(parse_long(s)); });
  exp.get("update_mode", c.update_mode, parse_update_mode);
  exp.check_unknown();

  SectionReader topo("topology", find("topology"));
  topo.get("layer_sizes", c.layer_sizes, parse_int_list);
  topo.get("bias", c.bias, parse_bool);
  topo.get("neurons_per_dim", c.neurons_per_dim,
           [](const std::string& s) { return static_cast<int>(parse_long(s)); });
  topo.check_unknown();

  SectionReader act("activation", find("activation"));
  act.get("kind", c.activation, parse_activation_kind);
  act.get("derivative", c.derivative, parse_derivative_mode);
  act.check_unknown();

  SectionReader neu("neuron", find("neuron"));
  neu.get("tau", c.neuron.tau, parse_double);
  neu.get("u_rest", c.neuron.u_rest, parse_double);
  neu.get("u_reset", c.neuron.u_reset, parse_double);
  neu.get("theta", c.neuron.theta, parse_double);
  neu.get("delta", c.neuron.delta, parse_double);
  neu.get("tau_s", c.neuron.tau_s, parse_double);
  neu.get("tau_r", c.neuron.tau_r, parse_double);
  neu.get("u_psp", c.neuron.u_psp, parse_double);
  neu.get("resistance", c.neuron.resistance, parse_double);
  neu.check_unknown();

  SectionReader sch("schedule", find("schedule"));
  sch.get("dt", c.schedule.dt, parse_double);
  sch.get("t_forward", c.schedule.t_forward, parse_double);
  sch.get("t_backward", c.schedule.t_backward, parse_double);
  sch.get("beta", c.schedule.beta, parse_double);
  sch.check_unknown();

  SectionReader lrn("learning", find("learning"));
  lrn.get("eta_base", c.eta_base, parse_double);
  lrn.get("init_scale", c.init_scale, parse_double);
  lrn.get("s_init", c.s_init, parse_double);
  lrn.get("bias_activation", c.bias_activation, parse_double);
  lrn.get("reset_traces", c.reset_traces, parse_bool);
  lrn.check_unknown();

  c.validate();
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[experiment]\n";
  out << "model = " << to_string(c.model) << "\n";
  out << "seed = " << c.seed << "\n";
  out << "n_train_samples = " << c.n_train_samples << "\n";
  out << "eval_every = " << c.eval_every << "\n";
  out << "eval_grid = " << c.eval_grid << "\n";
  out << "update_mode = " << to_string(c.update_mode) << "\n";
  out << "\n[topology]\n";
  out << "layer_sizes = ";
  for (std::size_t i = 0; i < c.layer_sizes.size(); ++i) {
    if (i) out << ",";
    out << c.layer_sizes[i];
  }
  out << "\n";
  out << "bias = " << (c.bias ? "true" : "false") << "\n";
  out << "neurons_per_dim = " << c.neurons_per_dim << "\n";
  out << "\n[activation]\n";
  out << "kind = " << to_string(c.activation) << "\n";
  out << "derivative = " << to_string(c.derivative) << "\n";
  out << "\n[neuron]\n";
  out << "tau = " << format_double(c.neuron.tau) << "\n";
  out << "u_rest = " << format_double(c.neuron.u_rest) << "\n";
  out << "u_reset = " << format_double(c.neuron.u_reset) << "\n";
  out << "theta = " << format_double(c.neuron.theta) << "\n";
  out << "delta = " << format_double(c.neuron.delta) << "\n";
  out << "tau_s = " << format_double(c.neuron.tau_s) << "\n";
  out << "tau_r = " << format_double(c.neuron.tau_r) << "\n";
  out << "u_psp = " << format_double(c.neuron.u_psp) << "\n";
  out << "resistance = " << format_double(c.neuron.resistance) << "\n";
  out << "\n[schedule]\n";
  out << "dt = " << format_double(c.schedule.dt) << "\n";
  out << "t_forward = " << format_double(c.schedule.t_forward) << "\n";
  out << "t_backward = " << format_double(c.schedule.t_backward) << "\n";
  out << "beta = " << format_double(c.schedule.beta) << "\n";
  out << "\n[learning]\n";
  out << "eta_base = " << format_double(c.eta_base) << "\n";
  out << "init_scale = " << format_double(c.init_scale) << "\n";
  out << "s_init = " << format_double(c.s_init) << "\n";
  out << "bias_activation = " << format_double(c.bias_activation) << "\n";
  out << "reset_traces = " << (c.reset_traces ? "true" : "false") << "\n";
  return out.str();
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

}  // namespace eqprop

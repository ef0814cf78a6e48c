// boxlab command-line runner.
//
// Each subcommand resolves its configuration in three layers (built-in
// defaults, then the --config file, then explicit flags) and embeds the
// resolved config plus its content hash in every output.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "boxlab/acceptance.hpp"
#include "boxlab/correlation.hpp"
#include "boxlab/csv.hpp"
#include "boxlab/decomposition.hpp"
#include "boxlab/errors.hpp"
#include "boxlab/freewill.hpp"
#include "boxlab/json_io.hpp"
#include "boxlab/metrics.hpp"
#include "boxlab/numeric.hpp"
#include "boxlab/singlet.hpp"
#include "boxlab/srx.hpp"

namespace {

using boxlab::io::json;
using boxlab::Rational;

constexpr const char* kVersion = "1.0.0";

enum Exit { ok = 0, failed = 1, schema = 2, invariant = 3, io_error = 4 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw boxlab::InvalidArgument(path + ": " + e.what());
  }
}

/// A flag that overrides a config key only when given on the command line.
struct Binding {
  CLI::Option* opt;
  std::string key;
  std::function<json()> value;
};

struct Command {
  explicit Command(CLI::App* a) : app(a) {}

  CLI::App* app;
  json defaults;
  std::vector<Binding> bindings;

  template <class V>
  CLI::Option* flag(const std::string& names, const std::string& key, V& var, const std::string& help) {
    auto* o = app->add_option(names, var, help);
    bindings.push_back({o, key, [&var] { return json(var); }});
    return o;
  }

  CLI::Option* toggle(const std::string& names, const std::string& key, bool& var, const std::string& help) {
    auto* o = app->add_flag(names, var, help);
    bindings.push_back({o, key, [&var] { return json(var); }});
    return o;
  }
};

struct Globals {
  std::string config_path;
  std::uint64_t seed = 20061;
  std::string numeric_mode = "float";
  std::string output;
  std::string format;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* mode_opt = nullptr;
  CLI::Option* output_opt = nullptr;
  CLI::Option* format_opt = nullptr;
};

/// defaults <- config file (top level, then the section named after the subcommand) <- flags.
json resolve(const Command& cmd, const Globals& g, const std::string& default_format) {
  json cfg = cmd.defaults;
  if (!cfg.contains("seed")) cfg["seed"] = g.seed;
  if (!cfg.contains("numeric_mode")) cfg["numeric_mode"] = g.numeric_mode;
  if (!cfg.contains("format")) cfg["format"] = default_format;
  if (!cfg.contains("output")) cfg["output"] = "";
  if (!g.config_path.empty()) {
    json file = read_json_file(g.config_path);
    if (!file.is_object()) throw boxlab::InvalidArgument("config file must hold a JSON object");
    for (auto& [k, v] : file.items()) {
      if (k != cmd.app->get_name()) cfg[k] = v;
    }
    if (file.contains(cmd.app->get_name())) {
      for (auto& [k, v] : file.at(cmd.app->get_name()).items()) cfg[k] = v;
    }
  }
  if (g.seed_opt->count()) cfg["seed"] = g.seed;
  if (g.mode_opt->count()) cfg["numeric_mode"] = g.numeric_mode;
  if (g.output_opt->count()) cfg["output"] = g.output;
  if (g.format_opt->count()) cfg["format"] = g.format;
  for (const auto& b : cmd.bindings) {
    if (b.opt->count()) cfg[b.key] = b.value();
  }
  cfg["command"] = cmd.app->get_name();
  cfg["version"] = kVersion;

  auto mode = cfg.at("numeric_mode").get<std::string>();
  if (mode != "exact" && mode != "float") throw boxlab::InvalidArgument("numeric_mode must be exact or float");
  auto fmt = cfg.at("format").get<std::string>();
  if (fmt != "csv" && fmt != "json") throw boxlab::InvalidArgument("format must be csv or json");
  if (!cfg.at("seed").is_number_unsigned() && !cfg.at("seed").is_number_integer()) {
    throw boxlab::InvalidArgument("seed must be an unsigned integer");
  }
  return cfg;
}

bool exact(const json& cfg) { return cfg.at("numeric_mode") == "exact"; }

std::uint64_t get_u64(const json& cfg, const char* key) {
  const auto& v = cfg.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  if (v.is_number_float() && v.get<double>() >= 0 && v.get<double>() == static_cast<double>(static_cast<std::uint64_t>(v.get<double>()))) {
    return static_cast<std::uint64_t>(v.get<double>());
  }
  throw boxlab::InvalidArgument(std::string(key) + " must be a non-negative integer");
}

double get_double(const json& v, const char* what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return boxlab::to_double(boxlab::parse_rational(v.get<std::string>()));
  throw boxlab::InvalidArgument(std::string(what) + " must be a number");
}

/// "start:stop:step" (inclusive, exact arithmetic), or a comma-separated list.
std::vector<Rational> parse_grid(const std::string& text) {
  std::vector<Rational> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw boxlab::InvalidArgument("grid must be start:stop:step");
    Rational lo = boxlab::parse_rational(parts[0]);
    Rational hi = boxlab::parse_rational(parts[1]);
    Rational step = boxlab::parse_rational(parts[2]);
    if (step <= 0) throw boxlab::InvalidArgument("grid step must be positive");
    for (Rational v = lo; v <= hi; v += step) out.push_back(v);
    return out;
  }
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    if (!p.empty()) out.push_back(boxlab::parse_rational(p));
  }
  if (out.empty()) throw boxlab::InvalidArgument("empty grid: " + text);
  return out;
}

template <boxlab::Scalar T>
T conv(const Rational& r) {
  if constexpr (std::is_same_v<T, Rational>) {
    return r;
  } else {
    return boxlab::to_double(r);
  }
}

/// A box given as a name, a 16-entry array, a box object, or {"file": path}.
template <boxlab::Scalar T>
boxlab::Correlation16<T> box_from_config(const json& v) {
  if (v.is_object() && v.contains("file")) return boxlab::io::correlation_from_json<T>(read_json_file(v.at("file")));
  return boxlab::io::correlation_from_json<T>(v);
}

// ---------------------------------------------------------------- output

struct Artifact {
  json result;
  std::function<void(boxlab::io::CsvWriter&)> csv;  ///< header and rows
  std::vector<std::pair<std::string, std::string>> notes;
};

void emit(json cfg, const Artifact& art) {
  // Where the artifact goes is not part of what it contains.
  const std::string path = cfg.at("output").get<std::string>();
  cfg.erase("output");
  std::string hash = boxlab::io::content_hash(cfg);
  std::ostringstream os;
  if (cfg.at("format") == "json") {
    json doc{{"config", cfg}, {"content_hash", hash}, {"result", art.result}};
    os << doc.dump(2) << '\n';
  } else {
    boxlab::io::CsvWriter w(os);
    w.comment("config", cfg.dump());
    w.comment("content_hash", hash);
    for (const auto& [k, v] : art.notes) w.comment(k, v);
    art.csv(w);
  }
  if (path.empty()) {
    std::cout << os.str() << std::flush;
    if (!std::cout) throw IoError("failed writing to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << os.str();
  if (!out.flush()) throw IoError("failed writing " + path);
}

// ---------------------------------------------------------------- metrics

template <boxlab::Scalar T>
Artifact run_metrics(const json& cfg) {
  using namespace boxlab;
  Artifact art;
  json res;
  std::vector<std::pair<std::string, std::string>> rows;
  auto add = [&](const std::string& k, const auto& v) {
    res[k] = io::scalar_to_json(v);
    rows.emplace_back(k, to_string(v));
  };

  std::optional<Correlation16<T>> box;
  if (cfg.contains("ensemble") && !cfg.at("ensemble").is_null()) {
    std::vector<WeightedBox<T>> ens;
    for (const auto& e : cfg.at("ensemble")) {
      ens.emplace_back(io::scalar_from_json<T>(e.at("weight")), box_from_config<T>(e.at("box")));
    }
    box = mix(ens);
    auto worst = ontic_metrics(ens);
    auto avg = ontic_metrics_averaged(ens);
    add("S_lambda", worst.s_lambda);
    add("I_lambda", worst.i_lambda);
    add("S_lambda_avg", avg.s_lambda);
    add("I_lambda_avg", avg.i_lambda);
  }
  if (!box) box = box_from_config<T>(cfg.at("box"));
  auto sig = signaling(*box);
  add("S", sig.s);
  add("S_a_to_b", sig.s_a_to_b);
  add("S_b_to_a", sig.s_b_to_a);
  add("I", randomness(*box));
  add("lambda", chsh_lambda(*box));
  add("C_lambda", cost_from_lambda(chsh_lambda(*box)));
  auto d = signaling_deltas(*box);
  for (std::size_t j = 0; j < 4; ++j) add("delta_" + std::to_string(j), d[j]);
  bool member = membership_oracle(*box).member;
  res["in_fragment"] = member;
  rows.emplace_back("in_fragment", member ? "true" : "false");
  res["correlation"] = io::correlation_to_json(*box);

  art.result = res;
  art.csv = [rows](io::CsvWriter& w) {
    w.header({"metric", "value"});
    for (const auto& [k, v] : rows) w.row({k, v});
  };
  return art;
}

// ---------------------------------------------------------------- decompose

template <boxlab::Scalar T>
Artifact run_decompose(const json& cfg) {
  using namespace boxlab;
  auto box = box_from_config<T>(cfg.at("box"));
  Decomposition<T> d;
  if (cfg.contains("free") && !cfg.at("free").is_null()) {
    const auto& f = cfg.at("free");
    if (!f.is_array() || f.size() != 3) throw InvalidArgument("free must list p1_0, p1_1, p1_4");
    d = construct_decomposition(box, FreeParams<T>{io::scalar_from_json<T>(f[0]), io::scalar_from_json<T>(f[1]),
                                                   io::scalar_from_json<T>(f[2])});
  } else {
    d = construct_decomposition(box);
  }
  auto cert = communication_cost(box);
  Artifact art;
  art.result = {{"decomposition", io::decomposition_to_json(d)}, {"certificate", io::certificate_to_json(cert)}};
  art.notes = {{"p1_total", to_string(d.p1_total())},
               {"c_lambda", to_string(cert.c_lambda)},
               {"lp_min_p1", to_string(cert.lp_min_p1)},
               {"optimal", cert.optimal ? "true" : "false"}};
  art.csv = [d](io::CsvWriter& w) {
    w.header({"kind", "j", "weight"});
    for (std::size_t j = 0; j < 8; ++j) w.row({"0bit", std::to_string(j), to_string(d.p0[j])});
    for (std::size_t j = 0; j < 8; ++j) w.row({"1bit", std::to_string(j), to_string(d.p1[j])});
  };
  return art;
}

// ---------------------------------------------------------------- freewill-sweep

const std::vector<std::string> kSweepColumns{"alpha", "l", "F", "lambda", "S", "I", "bound", "slack"};

template <boxlab::Scalar T>
Artifact run_freewill_sweep(const json& cfg) {
  using namespace boxlab;
  auto mode = cfg.at("mode").get<std::string>();
  auto resource = resource_family(conv<T>(parse_rational(cfg.at("resource_s").get<std::string>())));
  std::vector<std::vector<std::string>> rows;
  json jrows = json::array();
  std::uint64_t skipped = 0;

  auto push = [&](const std::vector<std::string>& cells) {
    rows.push_back(cells);
    json r;
    for (std::size_t i = 0; i < cells.size(); ++i) r[kSweepColumns[i]] = cells[i];
    jrows.push_back(r);
  };
  auto push_model = [&](const FreewillModel<T>& m) {
    auto acc = resource_accounting(m, resource);
    push({to_string(m.alpha), to_string(m.l), to_string(m.free_will), to_string(m.lambda),
          to_string(signaling(m.correlation).s), to_string(randomness(m.correlation)), to_string(acc.bound),
          to_string(acc.slack)});
  };

  auto grid = [&](const char* key) { return parse_grid(cfg.at(key).get<std::string>()); };
  if (mode == "L") {
    for (const auto& a : grid("alpha_grid")) push_model(build_L_mode(conv<T>(a)));
  } else if (mode == "LF") {
    for (const auto& a : grid("alpha_grid")) {
      for (const auto& l : grid("l_grid")) push_model(build_LF_mode(conv<T>(a), conv<T>(l)));
    }
  } else if (mode == "F") {
    for (const auto& c : grid("c_grid")) push_model(build_F_mode(conv<T>(c)));
  } else if (mode == "mixed") {
    for (const auto& c : grid("c_grid")) {
      for (const auto& f : grid("f_grid")) {
        if (f < 1 - c / 3 || f > 1) {
          ++skipped;
          continue;
        }
        push_model(build_mixed_mode(conv<T>(f), conv<T>(c)));
      }
    }
  } else if (mode == "partial") {
    // Free will and the complementarity bound are not defined for this construction.
    for (const auto& a : grid("alpha_grid")) {
      auto box = build_partial_L<T>({0, 1, 2, 3}, conv<T>(a));
      push({to_string(conv<T>(a)), "", "", to_string(chsh_lambda(box)), to_string(signaling(box).s),
            to_string(randomness(box)), "", ""});
    }
  } else {
    throw InvalidArgument("mode must be one of L, LF, F, mixed, partial");
  }

  Artifact art;
  art.result = {{"rows", jrows}, {"skipped_unreachable", skipped}};
  art.notes = {{"skipped_unreachable", std::to_string(skipped)}};
  art.csv = [rows](io::CsvWriter& w) {
    w.header(kSweepColumns);
    for (const auto& r : rows) w.row(r);
  };
  return art;
}

// ---------------------------------------------------------------- singlet-sim

std::vector<double> theta_list(const json& v) {
  std::vector<double> out;
  if (v.is_string() && v.get<std::string>() == "default") return boxlab::default_theta_grid_degrees();
  if (v.is_string()) {
    for (const auto& r : parse_grid(v.get<std::string>())) out.push_back(boxlab::to_double(r));
    return out;
  }
  if (v.is_number()) return {v.get<double>()};
  for (const auto& e : v) out.push_back(get_double(e, "theta"));
  if (out.empty()) throw boxlab::InvalidArgument("theta grid is empty");
  return out;
}

boxlab::SingletResource singlet_resource(const json& cfg) {
  return boxlab::SingletResource::parse(cfg.at("variant").get<std::string>(), get_double(cfg.at("s"), "s"));
}

Artifact run_singlet_sim(const json& cfg) {
  using namespace boxlab;
  auto thetas = theta_list(cfg.at("theta"));
  std::vector<MeasurementPair> pairs;
  for (double t : thetas) pairs.push_back(MeasurementPair::at_angle(degrees_to_radians(t)));
  auto stats = boxlab::run_singlet_sim(singlet_resource(cfg), pairs, get_u64(cfg, "trials"), get_u64(cfg, "seed"));
  Artifact art;
  json rows = json::array();
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto& s = stats[i];
    rows.push_back({{"theta", thetas[i]},
                    {"estimate", s.estimate()},
                    {"target", s.target()},
                    {"stderr", s.standard_error()},
                    {"comm_bits_per_trial", s.comm_bits_per_trial()},
                    {"marginal_a", s.marginal_a()},
                    {"marginal_b", s.marginal_b()}});
  }
  art.result = {{"rows", rows}};
  art.csv = [stats, thetas](io::CsvWriter& w) {
    w.header({"theta", "estimate", "target", "stderr", "comm_bits_per_trial"});
    for (std::size_t i = 0; i < stats.size(); ++i) {
      const auto& s = stats[i];
      w.row({io::cell(thetas[i]), io::cell(s.estimate()), io::cell(s.target()), io::cell(s.standard_error()),
             io::cell(s.comm_bits_per_trial())});
    }
  };
  return art;
}

// ---------------------------------------------------------------- srx-embed / hie

boxlab::SrxConfig srx_from(const json& v) {
  if (v.is_string() && (v == "inf" || v == "infinity")) return boxlab::SrxConfig::newtonian();
  return {boxlab::SignalSpeed::finite(get_double(v, "v_lambda"))};
}

boxlab::Event event_from(const json& j, const char* label) {
  boxlab::Event e;
  e.label = j.value("label", std::string(label));
  e.t = get_double(j.at("t"), "t");
  const auto& x = j.at("x");
  if (x.is_number()) {
    e.x = {x.get<double>(), 0.0};
  } else {
    if (!x.is_array() || x.empty() || x.size() > 2) throw boxlab::InvalidArgument("event x must be [x] or [x, y]");
    e.x = {get_double(x[0], "x"), x.size() > 1 ? get_double(x[1], "y") : 0.0};
  }
  return e;
}

std::unique_ptr<boxlab::EmbeddableProtocol> protocol_from(const json& p) {
  using namespace boxlab;
  auto type = p.value("type", std::string("singlet"));
  if (type == "singlet") {
    json sub{{"variant", p.value("variant", std::string("prbox"))}, {"s", p.value("s", json(0.5))}};
    auto thetas = theta_list(p.value("theta", json("default")));
    std::vector<MeasurementPair> pairs;
    for (double t : thetas) pairs.push_back(MeasurementPair::at_angle(degrees_to_radians(t)));
    return std::make_unique<SingletProtocol>(singlet_resource(sub), pairs);
  }
  if (type == "mixed-mode") {
    return std::make_unique<MixedModeProtocol>(io::scalar_from_json<Rational>(p.at("F")),
                                               io::scalar_from_json<Rational>(p.at("C")), p.value("advisory", false),
                                               p.value("advisory_strength", 1.0));
  }
  throw InvalidArgument("protocol.type must be singlet or mixed-mode");
}

Artifact run_srx_embed(const json& cfg) {
  using namespace boxlab;
  auto proto = protocol_from(cfg.at("protocol"));
  EmbeddingConfig ec;
  ec.srx = srx_from(cfg.at("v_lambda"));
  const auto& geo = cfg.at("geometry");
  ec.alice = event_from(geo.at("alice"), "A");
  ec.bob = event_from(geo.at("bob"), "B");
  if (geo.contains("worldline")) {
    for (const auto& e : geo.at("worldline")) ec.worldline.push_back(event_from(e, "W"));
  }
  ec.policy = parse_breakdown_policy(cfg.at("breakdown_policy").get<std::string>());
  ec.trials = get_u64(cfg, "trials");
  ec.seed = get_u64(cfg, "seed");
  ec.oblivious_strict = cfg.at("oblivious_strict").get<bool>();
  auto trace_path = cfg.at("ontic_trace").get<std::string>();
  if (!trace_path.empty() && ec.oblivious_strict) {
    throw InvalidArgument("--ontic-trace is refused for an oblivious-strict run");
  }
  ec.keep_records = true;
  auto run = embed_and_run(ec, *proto);
  auto rep = ontic_vs_operational_report(run, *proto);

  if (!trace_path.empty()) {
    std::ofstream out(trace_path, std::ios::binary);
    if (!out) throw IoError("cannot open " + trace_path + " for writing");
    io::CsvWriter w(out);
    w.comment("content_hash", io::content_hash(cfg));
    w.header({"trial", "point", "ontic_key", "message_sent", "message_delivered", "fallback"});
    for (const auto& r : run.ontic) {
      w.row({io::cell(r.trial), io::cell(static_cast<std::uint64_t>(r.point)),
             io::cell(static_cast<std::uint64_t>(r.ontic_key)), io::cell(r.message_sent),
             io::cell(r.message_delivered), io::cell(r.fallback)});
    }
    if (!out.flush()) throw IoError("failed writing " + trace_path);
  }

  json levels = json::array();
  for (const auto& l : rep.levels) {
    levels.push_back({{"ontology", l.ontology},
                      {"S_lambda", l.s_lambda},
                      {"I_lambda", l.i_lambda},
                      {"fwt_holds", l.fwt_holds},
                      {"ut_holds", l.ut_holds},
                      {"complementarity_slack", l.complementarity_slack}});
  }
  json points = json::array();
  std::vector<std::vector<std::string>> rows;
  for (std::size_t p = 0; p < run.tallies.size(); ++p) {
    const auto& t = run.tallies[p];
    double n = static_cast<double>(t.trials);
    double lam = chsh_lambda(detail::empirical_box(t.box_counts));
    std::vector<std::string> row{io::cell(static_cast<std::uint64_t>(p)), io::cell(t.trials),
                                 io::cell(static_cast<double>(t.xor_ones) / n),
                                 io::cell(static_cast<double>(t.a_ones) / n),
                                 io::cell(static_cast<double>(t.b_ones) / n), io::cell(lam),
                                 io::cell(static_cast<double>(t.comm_bits) / n)};
    points.push_back({{"point", p},
                      {"trials", t.trials},
                      {"xor_rate", static_cast<double>(t.xor_ones) / n},
                      {"a_rate", static_cast<double>(t.a_ones) / n},
                      {"b_rate", static_cast<double>(t.b_ones) / n},
                      {"lambda_empirical", lam},
                      {"comm_bits_per_trial", static_cast<double>(t.comm_bits) / n}});
    rows.push_back(std::move(row));
  }

  Artifact art;
  art.result = {{"protocol", rep.protocol},
                {"relabeled", run.relabeled},
                {"v_exp", run.v_exp},
                {"condition_holds", run.condition_holds},
                {"messages_delivered", run.messages_delivered},
                {"fallbacks", run.fallbacks},
                {"S_model", rep.s_model},
                {"I_model", rep.i_model},
                {"S_empirical", rep.s_empirical},
                {"I_empirical", rep.i_empirical},
                {"delta_z", rep.delta_z},
                {"zero_signal_consistent", rep.zero_signal_consistent},
                {"levels", levels},
                {"S_lambda_trace", rep.s_lambda_trace},
                {"I_lambda_trace", rep.i_lambda_trace},
                {"free_will_full", rep.free_will_full},
                {"theorems_hold", rep.theorems_hold},
                {"audit", {{"records_scanned", rep.audit.records_scanned}, {"leaked_fields", rep.audit.leaked_fields}}},
                {"points", points}};
  art.notes = {{"protocol", rep.protocol},
               {"relabeled", run.relabeled ? "true" : "false"},
               {"v_exp", io::cell(run.v_exp)},
               {"condition_holds", run.condition_holds ? "true" : "false"},
               {"messages_delivered", io::cell(run.messages_delivered)},
               {"fallbacks", io::cell(run.fallbacks)},
               {"S_model", io::cell(rep.s_model)},
               {"S_empirical", io::cell(rep.s_empirical)},
               {"zero_signal_consistent", rep.zero_signal_consistent ? "true" : "false"},
               {"audit_leaked_fields", io::cell(rep.audit.leaked_fields)}};
  art.csv = [rows](io::CsvWriter& w) {
    w.header({"point", "trials", "xor_rate", "a_rate", "b_rate", "lambda_empirical", "comm_bits_per_trial"});
    for (const auto& r : rows) w.row(r);
  };
  if (!rep.theorems_hold && rep.free_will_full) throw InvariantViolation("ontic theorems violated in embedded run");
  if (rep.audit.leaked_fields != 0 && ec.oblivious_strict) throw InvariantViolation("obliviousness audit failed");
  return art;
}

Artifact run_hie(const json& cfg) {
  using namespace boxlab;
  HieGeometry g{get_double(cfg.at("distance"), "distance"), get_double(cfg.at("separation"), "separation"),
                get_double(cfg.at("t_a"), "t_a"), get_double(cfg.at("t_b"), "t_b")};
  auto r = hidden_influence_scenario(srx_from(cfg.at("v_lambda")), g, get_u64(cfg, "trials"), get_u64(cfg, "seed"));
  auto arm_json = [](const HieArm& a) {
    return json{{"alice_measures", a.alice_measures},
                {"trials", a.trials},
                {"correlation", a.correlation()},
                {"stderr", a.correlation_stderr()},
                {"reaches_first", a.reaches_first},
                {"reaches_second", a.reaches_second}};
  };
  Artifact art;
  art.result = {{"signal", r.signal()},
                {"v_exp", r.v_exp},
                {"particles_connected", r.particles_connected},
                {"with_alice", arm_json(r.with_alice)},
                {"without_alice", arm_json(r.without_alice)}};
  art.notes = {{"signal", io::cell(r.signal())}, {"v_exp", io::cell(r.v_exp)}};
  art.csv = [r](io::CsvWriter& w) {
    w.header({"alice_measures", "trials", "correlation", "stderr", "reaches_first", "reaches_second"});
    for (const auto* a : {&r.with_alice, &r.without_alice}) {
      w.row({io::cell(a->alice_measures), io::cell(a->trials), io::cell(a->correlation()),
             io::cell(a->correlation_stderr()), io::cell(a->reaches_first), io::cell(a->reaches_second)});
    }
  };
  return art;
}

// ---------------------------------------------------------------- acceptance

int run_acceptance_cmd(const json& cfg) {
  boxlab::acceptance::Options opt;
  opt.seed = get_u64(cfg, "seed");
  opt.corrupt_table = cfg.at("corrupt_table").get<bool>();
  opt.only = cfg.at("only").get<int>();
  if (opt.only < 0 || opt.only > 10) throw boxlab::InvalidArgument("--only must be between 1 and 10");
  json rows = json::array();
  bool all = true;
  bool text = cfg.at("format") == "csv";
  auto results = boxlab::acceptance::run(opt, [&](const boxlab::acceptance::Outcome& o) {
    if (text) std::cout << boxlab::acceptance::format_line(o) << '\n' << std::flush;
  });
  for (const auto& o : results) {
    all = all && o.pass;
    rows.push_back({{"id", o.id},
                    {"name", o.name},
                    {"measured", o.measured},
                    {"tolerance", o.tolerance},
                    {"pass", o.pass},
                    {"seconds", o.seconds},
                    {"budget_seconds", o.budget_seconds}});
  }
  if (text) {
    std::cout << (all ? "ALL PASS" : "FAILURES PRESENT") << " (" << results.size() << " criteria)\n";
  } else {
    std::cout << json{{"config", cfg}, {"criteria", rows}, {"all_pass", all}}.dump(2) << '\n';
  }
  return all ? Exit::ok : Exit::failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boxlab: nonlocal-box correlations, decompositions, free will and embedding experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  Globals g;
  app.add_option("--config", g.config_path, "JSON config file; flags given on the command line win");
  g.seed_opt = app.add_option("--seed", g.seed, "64-bit seed");
  g.mode_opt = app.add_option("--numeric-mode", g.numeric_mode, "exact (rational) or float")
                   ->check(CLI::IsMember({"exact", "float"}));
  g.output_opt = app.add_option("--output,-o", g.output, "output file (default stdout)");
  g.format_opt = app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  // metrics
  Command metrics{app.add_subcommand("metrics", "Signaling, randomness and CHSH value of a box (JSON by default)")};
  std::string m_box = "pr";
  std::string m_input;
  std::string m_ensemble;
  metrics.defaults = {{"box", "pr"}, {"ensemble", nullptr}};
  metrics.flag("--box", "box", m_box, "pr | white | uniform-local | 0bit:J | 1bit:J");
  auto* m_input_opt = metrics.app->add_option("--input", m_input, "JSON file holding a 16-entry correlation");
  auto* m_ens_opt = metrics.app->add_option("--ensemble", m_ensemble, "JSON file: [{weight, box}, ...]");
  metrics.app->footer(
      "CSV columns:\n  metric  name of the quantity (S, S_a_to_b, S_b_to_a, I, lambda, C_lambda, delta_0..3,\n"
      "          in_fragment; S_lambda, I_lambda and their averages when an ensemble is given)\n"
      "  value   its value (p/q in exact mode)");

  // decompose
  Command decompose{app.add_subcommand("decompose", "Decompose a box into 0-bit and 1-bit boxes (JSON by default)")};
  std::string d_box = "pr";
  std::string d_input;
  bool d_exact = false;
  std::vector<std::string> d_free;
  decompose.defaults = {{"box", "pr"}, {"free", nullptr}};
  decompose.flag("--box", "box", d_box, "named box");
  auto* d_input_opt = decompose.app->add_option("--input", d_input, "JSON file holding a 16-entry correlation");
  decompose.app->add_flag("--exact", d_exact, "force rational arithmetic");
  auto* d_free_opt =
      decompose.app->add_option("--free", d_free, "free parameters p1_0,p1_1,p1_4")->delimiter(',')->expected(3);
  decompose.app->footer("CSV columns:\n  kind    0bit or 1bit\n  j       box index 0..7\n  weight  mixture weight");

  // freewill-sweep
  Command sweep{app.add_subcommand("freewill-sweep", "Sweep the free-will constructions (CSV by default)")};
  std::string s_mode = "L", s_alpha = "0:1/4:1/64", s_l = "0:1:1/4", s_f = "0:1:1/8", s_c = "0:1:1/4", s_res = "0";
  sweep.defaults = {{"numeric_mode", "exact"}, {"mode", "L"},        {"alpha_grid", s_alpha}, {"l_grid", s_l},
                    {"f_grid", s_f},      {"c_grid", s_c},         {"resource_s", s_res}};
  sweep.flag("--mode", "mode", s_mode, "L | LF | F | mixed | partial")
      ->check(CLI::IsMember({"L", "LF", "F", "mixed", "partial"}));
  sweep.flag("--alpha-grid", "alpha_grid", s_alpha, "start:stop:step or comma list (L, LF, partial)");
  sweep.flag("--l-grid", "l_grid", s_l, "weight of the 0-bit boxes (LF)");
  sweep.flag("--f-grid", "f_grid", s_f, "average free will (mixed)");
  sweep.flag("--c-grid", "c_grid", s_c, "communication cost C_Lambda (F, mixed)");
  sweep.flag("--resource-s", "resource_s", s_res, "signaling s of the communicated C=1 resource");
  sweep.app->footer(
      "CSV columns:\n  alpha   suppressed-input weight of the biased scheme\n  l       weight of the 0-bit boxes\n"
      "  F       free will\n  lambda  CHSH value\n  S       operational signaling\n  I       operational randomness\n"
      "  bound   max(0, C_Lambda - 3(1 - F))\n  slack   S_R + 2 I_R - bound for the communicated resource\n"
      "Columns that a construction does not define are left empty.");

  // singlet-sim
  Command singlet{app.add_subcommand("singlet-sim", "Monte Carlo of the singlet simulation (CSV by default)")};
  std::string t_variant = "prbox";
  double t_s = 0.5;
  std::vector<double> t_theta;
  std::uint64_t t_trials = 100000;
  singlet.defaults = {{"variant", "prbox"}, {"s", 0.5}, {"theta", "default"}, {"trials", 100000}};
  singlet.flag("--variant", "variant", t_variant, "prbox | toner-bacon | general");
  singlet.flag("--s", "s", t_s, "signaling of the general resource");
  singlet.flag("--theta", "theta", t_theta, "angles in degrees (default 0,15,...,165)")->delimiter(',');
  singlet.flag("--trials", "trials", t_trials, "trials per angle");
  singlet.app->footer(
      "CSV columns:\n  theta                angle between the measurement vectors, degrees\n"
      "  estimate             fraction of trials with n_A xor n_B = 1\n  target               (1 + cos theta)/2\n"
      "  stderr               binomial standard error of estimate\n"
      "  comm_bits_per_trial  classical bits charged per trial");

  // srx-embed
  Command embed{app.add_subcommand("srx-embed", "Embed a protocol in spacetime (CSV by default)")};
  std::string e_scenario, e_v, e_policy, e_trace;
  std::uint64_t e_trials = 0;
  bool e_strict = true;
  embed.defaults = {{"v_lambda", "inf"},
                    {"geometry", {{"alice", {{"t", 0}, {"x", {0, 0}}}}, {"bob", {{"t", 1}, {"x", {1, 0}}}}}},
                    {"protocol", {{"type", "singlet"}, {"variant", "prbox"}}},
                    {"trials", 10000},
                    {"breakdown_policy", "local-marginal"},
                    {"oblivious_strict", true},
                    {"ontic_trace", ""}};
  auto* e_scen_opt = embed.app->add_option("--scenario", e_scenario, "scenario JSON file");
  embed.flag("--v-lambda", "v_lambda", e_v, "ontic signal speed (>= 1) or inf");
  embed.flag("--trials", "trials", e_trials, "trials per point");
  embed.flag("--breakdown-policy", "breakdown_policy", e_policy, "local-marginal | fair-coin | default-input");
  embed.flag("--oblivious-strict", "oblivious_strict", e_strict, "forbid any ontic output (true/false)");
  embed.flag("--ontic-trace", "ontic_trace", e_trace, "write the segregated ontic trace (refused when strict)");
  embed.app->footer(
      "CSV columns:\n  point                measurement point index\n  trials               trials at the point\n"
      "  xor_rate             fraction with outcome_A xor outcome_B = 1\n  a_rate, b_rate       fraction of outcome 1\n"
      "  lambda_empirical     CHSH value of the empirical box at the resource interface\n"
      "  comm_bits_per_trial  classical bits charged per trial");

  // hie
  Command hie{app.add_subcommand("hie", "Hidden-influence signaling scenario (CSV by default)")};
  std::string h_v;
  double h_l = 10, h_r = 1, h_ta = 0, h_tb = 1;
  std::uint64_t h_trials = 10000;
  hie.defaults = {{"v_lambda", "20"}, {"distance", 10.0}, {"separation", 1.0},
                  {"t_a", 0.0},       {"t_b", 1.0},       {"trials", 10000}};
  hie.flag("--v-lambda", "v_lambda", h_v, "ontic signal speed (>= 1) or inf");
  hie.flag("--distance", "distance", h_l, "Alice to the midpoint of Bob's particles");
  hie.flag("--separation", "separation", h_r, "distance between Bob's particles");
  hie.flag("--t-a", "t_a", h_ta, "time of Alice's measurement");
  hie.flag("--t-b", "t_b", h_tb, "time of Bob's measurements");
  hie.flag("--trials", "trials", h_trials, "trials per arm");
  hie.app->footer(
      "CSV columns:\n  alice_measures   arm label\n  trials           trials in the arm\n"
      "  correlation      P(same) - P(different) of Bob's two outcomes\n  stderr           its standard error\n"
      "  reaches_first    Alice's influence reaches the first particle in time\n"
      "  reaches_second   Alice's influence reaches the second particle in time");

  // acceptance
  Command accept{app.add_subcommand("acceptance", "Run the acceptance suite; exits non-zero on any failure")};
  int a_only = 0;
  bool a_corrupt = false;
  accept.defaults = {{"only", 0}, {"corrupt_table", false}};
  accept.flag("--only", "only", a_only, "run a single criterion (1-10)");
  accept.toggle("--corrupt-table", "corrupt_table", a_corrupt, "negative control: corrupt one table entry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return Exit::schema;
  }

  try {
    if (metrics.app->parsed()) {
      auto cfg = resolve(metrics, g, "json");
      if (m_input_opt->count()) cfg["box"] = json{{"file", m_input}};
      if (m_ens_opt->count()) cfg["ensemble"] = read_json_file(m_ensemble);
      emit(cfg, exact(cfg) ? run_metrics<Rational>(cfg) : run_metrics<double>(cfg));
    } else if (decompose.app->parsed()) {
      auto cfg = resolve(decompose, g, "json");
      if (d_input_opt->count()) cfg["box"] = json{{"file", d_input}};
      if (d_free_opt->count()) cfg["free"] = d_free;
      if (d_exact) cfg["numeric_mode"] = "exact";
      emit(cfg, exact(cfg) ? run_decompose<Rational>(cfg) : run_decompose<double>(cfg));
    } else if (sweep.app->parsed()) {
      auto cfg = resolve(sweep, g, "csv");
      emit(cfg, exact(cfg) ? run_freewill_sweep<Rational>(cfg) : run_freewill_sweep<double>(cfg));
    } else if (singlet.app->parsed()) {
      auto cfg = resolve(singlet, g, "csv");
      emit(cfg, run_singlet_sim(cfg));
    } else if (embed.app->parsed()) {
      // Scenario file sits between the config file and the flags.
      Command layered = embed;
      if (e_scen_opt->count()) {
        json scen = read_json_file(e_scenario);
        for (auto& [k, v] : scen.items()) layered.defaults[k] = v;
      }
      auto cfg = resolve(layered, g, "csv");
      emit(cfg, run_srx_embed(cfg));
    } else if (hie.app->parsed()) {
      auto cfg = resolve(hie, g, "csv");
      emit(cfg, run_hie(cfg));
    } else if (accept.app->parsed()) {
      auto cfg = resolve(accept, g, "csv");
      return run_acceptance_cmd(cfg);
    }
  } catch (const IoError& e) {
    std::cerr << "boxlab: I/O error: " << e.what() << '\n';
    return Exit::io_error;
  } catch (const boxlab::InvariantViolation& e) {
    std::cerr << "boxlab: invariant violation: " << e.what() << '\n';
    return Exit::invariant;
  } catch (const boxlab::Error& e) {
    std::cerr << "boxlab: " << e.what() << '\n';
    return Exit::schema;
  } catch (const json::exception& e) {
    std::cerr << "boxlab: bad configuration: " << e.what() << '\n';
    return Exit::schema;
  }
  return Exit::ok;
}

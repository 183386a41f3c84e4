// pwaq: analysis, synthesis, and simulation of quantized feedback control
// for discrete-time piecewise-affine systems.

#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>

#include "pwaq/certify.hpp"
#include "pwaq/errors.hpp"
#include "pwaq/io.hpp"
#include "pwaq/reach.hpp"
#include "pwaq/runtime.hpp"
#include "pwaq/synth.hpp"

using namespace pwaq;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitCertificate = 4;
constexpr int kExitSynthesis = 5;
constexpr int kExitProtocol = 6;

Channel parse_channel(const std::string& s) {
  if (s == "D") return Channel::Physical;
  if (s == "B") return Channel::InputQ;
  if (s == "BK") return Channel::StateQ;
  throw ValidationError("unknown channel '" + s + "' (expected D, B, or BK)");
}

Vec parse_point(const std::string& s) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  Vec x(static_cast<int>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) x[static_cast<int>(i)] = vals[i];
  return x;
}

void emit_report(const json& rep, const std::string& out_path) {
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw ValidationError("cannot write report: " + out_path);
    f << rep.dump(2) << "\n";
  }
  std::cout << rep.dump(2) << std::endl;
}

json successors_to_json(const std::vector<std::vector<int>>& map) {
  json m = json::array();
  for (const auto& row : map) {
    json r = json::array();
    for (int j : row) r.push_back(j + 1);
    m.push_back(r);
  }
  return m;
}

// Confinement spec: "<cell|all>:cell:<j>", "<cell|all>:X", "<cell|all>:<file>"
std::vector<std::pair<int, HPolytope>> parse_confinements(
    const std::vector<std::string>& specs, const SystemBundle& b) {
  std::vector<std::pair<int, HPolytope>> out;
  for (const std::string& spec : specs) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
      throw ValidationError("confinement '" + spec + "': expected i:target");
    const std::string who = spec.substr(0, colon);
    const std::string what = spec.substr(colon + 1);
    HPolytope Z;
    if (what == "X") {
      Z = b.sys.total_space;
    } else if (what.rfind("cell:", 0) == 0) {
      const int j = std::stoi(what.substr(5));
      if (j < 1 || j > b.sys.num_cells())
        throw ValidationError("confinement '" + spec + "': no cell " + what);
      Z = b.sys.cells[j - 1].region;
    } else {
      std::ifstream f(what);
      if (!f)
        throw ValidationError("confinement '" + spec + "': cannot open " + what);
      json pj;
      f >> pj;
      Z = HPolytope(matrix_from_json(pj.at("U")), vector_from_json(pj.at("v")));
    }
    if (who == "all") {
      for (int i = 0; i < b.sys.num_cells(); ++i) out.emplace_back(i, Z);
    } else {
      const int i = std::stoi(who);
      if (i < 1 || i > b.sys.num_cells())
        throw ValidationError("confinement '" + spec + "': no cell " + who);
      out.emplace_back(i - 1, Z);
    }
  }
  return out;
}

json constants_to_json(const StabilityConstants& c, const PwqCertificate& cert) {
  json gam = json::array(), mi = json::array();
  for (int i = 0; i < cert.gamma.size(); ++i) gam.push_back(cert.gamma[i]);
  for (int i = 0; i < c.m_i.size(); ++i) mi.push_back(c.m_i[i]);
  json out{{"alpha", c.alpha},
           {"beta", c.beta},
           {"gamma", gam},
           {"m_i", mi},
           {"m", c.m},
           {"Delta", c.Delta},
           {"M", c.M},
           {"eps_ij", c.eps},
           {"delta_ij", c.delta_param},
           {"epsilon_i_over_map_note", c.se_map_note}};
  if (c.mode == QuantizationMode::Input) {
    out["mode"] = "input";
    out["M_K"] = std::isfinite(c.M_K) ? json(c.M_K) : json();
  } else {
    out["mode"] = "state";
    out["m_tilde"] = c.m_tilde;
    out["m_bar"] = c.m_bar;
  }
  out["k0_bar"] = std::isfinite(c.k0_bar) ? json(c.k0_bar) : json();
  json pairs = json::array();
  for (const auto& p : c.phi)
    pairs.push_back(json{
        {"i", p.i + 1}, {"j", p.j + 1}, {"phi1", p.phi1}, {"phi2", p.phi2}});
  out["per_pair"] = pairs;
  return out;
}

int cmd_reach(const std::string& file, const std::string& method, double delta,
              const std::string& channel_s, const std::string& out_path) {
  const SystemBundle b = load_system(file);
  const Channel channel = parse_channel(channel_s);
  std::vector<std::vector<int>> map;
  if (method == "sbar" || method == "stilde") {
    if (!b.ctrl)
      throw ValidationError(
          "method " + method + " requires the 'controller' field in the file");
    for (int i = 0; i < b.sys.num_cells(); ++i)
      map.push_back(method == "sbar"
                        ? successors_exact(b.sys, *b.ctrl, i, delta, channel)
                              .successors
                        : successors_fast(b.sys, *b.ctrl, i, delta, channel)
                              .successors);
  } else if (method == "tfree") {
    const InputPolytope U =
        b.input ? *b.input : InputPolytope::whole(b.sys.input_dim);
    for (int i = 0; i < b.sys.num_cells(); ++i)
      map.push_back(
          successors_controller_free(b.sys, U, i, delta).successors);
  } else {
    throw ValidationError("unknown method '" + method + "'");
  }
  json rep{{"schema", "pwaq-report-v1"},
           {"kind", "reach"},
           {"method", method},
           {"delta", delta},
           {"channel", channel_s},
           {"successors", successors_to_json(map)}};
  emit_report(rep, out_path);
  return kExitOk;
}

int cmd_certify(const std::string& file, double eps, double delta_param,
                const std::string& mode_s, const std::string& artifact,
                const std::string& out_path) {
  SystemBundle b = load_system(file);
  if (!artifact.empty()) {
    const ControllerArtifact a = load_artifact(artifact);
    b.ctrl = a.ctrl;
    b.P = a.P;
  }
  if (!b.ctrl)
    throw ValidationError("certify requires a controller (file or --artifact)");
  if (!b.P)
    throw ValidationError(
        "certify requires certificate matrices (file 'certificate' or --artifact)");
  if (!b.quant) throw ValidationError("certify requires the 'quantizer' field");
  validate_controller(b.sys, *b.ctrl);
  const QuantizationMode mode =
      mode_s == "input" ? QuantizationMode::Input : QuantizationMode::State;
  const Channel channel =
      mode == QuantizationMode::Input ? Channel::InputQ : Channel::StateQ;

  std::vector<std::vector<int>> map;
  for (int i = 0; i < b.sys.num_cells(); ++i)
    map.push_back(
        successors_exact(b.sys, *b.ctrl, i, b.quant->delta, channel).successors);

  const PwqCertificate cert =
      verify_certificate(b.sys, *b.ctrl, *b.P, map, channel, b.quant->delta);
  const StabilityConstants consts =
      mode == QuantizationMode::Input
          ? input_constants(cert, b.sys, *b.ctrl, *b.quant, eps, delta_param)
          : state_constants(cert, b.sys, *b.ctrl, *b.quant, eps, delta_param);
  const ConditionReport rep =
      check_conditions(consts, cert, b.sys, *b.ctrl, *b.quant);
  json out{{"schema", "pwaq-report-v1"},
           {"kind", "certify"},
           {"constants", constants_to_json(consts, cert)},
           {"successors", successors_to_json(map)},
           {"conditions",
            {{"gap", {{"pass", rep.gap_pass}, {"slack", rep.gap_slack}}},
             {"invariance",
              {{"pass", rep.invariance_pass},
               {"slack", rep.invariance_slack}}}}}};
  if (rep.gap_pass)
    out["Omega"] = zoom_rate(consts);
  else
    out["Omega"] = json();
  emit_report(out, out_path);
  return kExitOk;
}

int cmd_synth(const std::string& file, const std::string& variant,
              const std::vector<std::string>& confine, int max_iter,
              bool fit_controller, const std::string& channel_s,
              const std::string& artifact_out, const std::string& out_path) {
  const SystemBundle b = load_system(file);
  const Channel channel = parse_channel(channel_s);
  json rep{{"schema", "pwaq-report-v1"}, {"kind", "synth"}};

  ControllerArtifact art;
  if (fit_controller) {
    if (!b.ctrl)
      throw ValidationError("--fit-controller requires the 'controller' field");
    if (!b.quant)
      throw ValidationError("--fit-controller requires the 'quantizer' field");
    std::vector<std::vector<int>> map;
    for (int i = 0; i < b.sys.num_cells(); ++i)
      map.push_back(
          successors_exact(b.sys, *b.ctrl, i, b.quant->delta, channel)
              .successors);
    double tau = 0, gmargin = 0;
    const std::vector<Mat> P = fit_best_certificate(
        b.sys, *b.ctrl, map, b.quant, QuantizationMode::State, 0.01, 0.49,
        &tau, &gmargin);
    const PwqCertificate cert =
        verify_certificate(b.sys, *b.ctrl, P, map, channel, b.quant->delta);
    art.ctrl = *b.ctrl;
    art.P = P;
    art.meta = json{{"kind", "fit"},
                    {"tau", tau},
                    {"gamma_margin", gmargin},
                    {"alpha", cert.alpha},
                    {"beta", cert.beta}};
    rep["status"] = "Feasible";
    rep["fit"] = art.meta;
    rep["successors"] = successors_to_json(map);
  } else {
    SynthesisProblem prob;
    prob.sys = b.sys;
    prob.input = b.input ? *b.input : InputPolytope::whole(b.sys.input_dim);
    prob.quant = b.quant;
    prob.delta = b.quant ? b.quant->delta : 0.0;
    prob.channel = channel;
    prob.variant = variant == "iss" ? SynthesisProblem::Variant::Iss
                                    : SynthesisProblem::Variant::Asymptotic;
    prob.confinements = parse_confinements(confine, b);
    prob.max_iter = max_iter;
    const SynthesisResult r = synthesize(prob);
    art.ctrl = r.ctrl;
    art.P = r.P;
    art.meta = json{{"kind", "ccl"},
                    {"iterations", r.iterations},
                    {"outer_rounds", r.outer_rounds},
                    {"trace", r.trace_value},
                    {"residual", r.residual},
                    {"tau", r.tau},
                    {"gamma_margin", r.gamma_margin},
                    {"alpha", r.cert.alpha},
                    {"beta", r.cert.beta}};
    if (r.omega) art.meta["Omega"] = *r.omega;
    rep["status"] = r.feasible ? "Feasible" : "Infeasible";
    rep["synthesis"] = art.meta;
    rep["successors"] = successors_to_json(r.succ_map);
  }
  if (!artifact_out.empty()) save_artifact(art, artifact_out);
  emit_report(rep, out_path);
  return kExitOk;
}

int cmd_simulate(const std::string& file, const std::string& mode_s,
                 const std::string& x0_s, int steps, uint64_t seed,
                 const std::string& csv, const std::string& svg,
                 const std::string& artifact, bool force, bool requantize,
                 const std::string& noise, double delta_dist,
                 double stop_radius, const std::string& out_path) {
  SystemBundle b = load_system(file);
  if (!artifact.empty()) {
    const ControllerArtifact a = load_artifact(artifact);
    b.ctrl = a.ctrl;
    b.P = a.P;
  }
  if (!b.ctrl) throw ValidationError("simulate requires a controller");
  validate_controller(b.sys, *b.ctrl);
  const Vec x0 = parse_point(x0_s);
  if (x0.size() != b.sys.state_dim)
    throw ValidationError("--x0 dimension mismatch");

  SimConfig cfg;
  cfg.x0 = x0;
  cfg.max_steps = steps;
  cfg.seed = seed;
  cfg.force = force;
  cfg.requantize = requantize;
  cfg.stop_radius = stop_radius;
  cfg.noise = noise == "worst" ? NoiseSource::WorstCorner : NoiseSource::Seeded;

  Trace tr;
  json rep{{"schema", "pwaq-report-v1"}, {"kind", "simulate"}, {"mode", mode_s}};
  if (mode_s == "disturbed") {
    cfg.mode = SimConfig::Mode::Disturbed;
    tr = simulate_disturbed(b.sys, *b.ctrl, cfg, delta_dist);
  } else {
    if (!b.quant)
      throw ValidationError("simulate requires the 'quantizer' field");
    if (!b.P)
      throw ValidationError(
          "simulate requires certificate matrices (file or --artifact)");
    const QuantizationMode mode =
        mode_s == "input" ? QuantizationMode::Input : QuantizationMode::State;
    const Channel channel =
        mode == QuantizationMode::Input ? Channel::InputQ : Channel::StateQ;
    std::vector<std::vector<int>> map;
    for (int i = 0; i < b.sys.num_cells(); ++i)
      map.push_back(
          successors_exact(b.sys, *b.ctrl, i, b.quant->delta, channel)
              .successors);
    const PwqCertificate cert =
        verify_certificate(b.sys, *b.ctrl, *b.P, map, channel, b.quant->delta);
    const StabilityConstants consts =
        mode == QuantizationMode::Input
            ? input_constants(cert, b.sys, *b.ctrl, *b.quant, 0.01, 0.49)
            : state_constants(cert, b.sys, *b.ctrl, *b.quant, 0.01, 0.49);
    const ConditionReport cond =
        check_conditions(consts, cert, b.sys, *b.ctrl, *b.quant);
    rep["conditions_pass"] = cond.all_pass();
    if (!cond.all_pass() && !force) {
      std::cerr << "stability conditions fail (rerun with --force to simulate "
                   "anyway)\n";
      return kExitProtocol;
    }
    cfg.mode = mode == QuantizationMode::Input ? SimConfig::Mode::InputQ
                                               : SimConfig::Mode::StateQ;
    tr = mode == QuantizationMode::Input
             ? simulate_input_q(b.sys, *b.ctrl, *b.quant, consts, cfg)
             : simulate_state_q(b.sys, *b.ctrl, *b.quant, consts, cfg);
  }

  if (!csv.empty()) trace_to_csv_file(tr, csv);
  if (!svg.empty() && b.sys.state_dim == 2) svg_plot(b.sys, tr, svg);
  rep["steps"] = tr.length();
  rep["zoom_events"] = tr.zoom_events;
  rep["final_norm"] = tr.x_final.size() ? tr.x_final.norm() : 0.0;
  rep["failed_guarantee"] = tr.failed_guarantee;
  if (tr.failed_guarantee) rep["failure"] = tr.failure;
  emit_report(rep, out_path);
  if (tr.failed_guarantee && !force) return kExitProtocol;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Quantized feedback control toolkit for discrete-time piecewise-affine "
      "systems"};
  app.require_subcommand(1);

  std::string file, out_path;

  auto* reach = app.add_subcommand("reach", "One-step successor-set analysis");
  std::string method = "sbar", channel_s = "D";
  double delta = 0.0;
  reach->add_option("--file", file, "System description (JSON)")->required();
  reach->add_option("--method", method, "sbar | stilde | tfree");
  reach->add_option("--delta", delta, "Disturbance level");
  reach->add_option("--channel", channel_s, "D | B | BK");
  reach->add_option("--out", out_path, "Write the report here");

  auto* certify = app.add_subcommand("certify", "Certificate + constants");
  double eps = 0.01, delta_param = 0.49;
  std::string mode_s = "state", artifact;
  certify->add_option("--file", file, "System description (JSON)")->required();
  certify->add_option("--eps", eps, "epsilon_ij in (0,1)");
  certify->add_option("--delta-param", delta_param, "delta_ij in (0,1)");
  certify->add_option("--mode", mode_s, "input | state");
  certify->add_option("--artifact", artifact, "Controller artifact (JSON)");
  certify->add_option("--out", out_path, "Write the report here");

  auto* synth = app.add_subcommand("synth", "Gain synthesis via CCL");
  std::string variant = "asym", artifact_out;
  std::vector<std::string> confine;
  int max_iter = 40;
  bool fit_controller = false;
  std::string synth_channel = "BK";
  synth->add_option("--file", file, "System description (JSON)")->required();
  synth->add_option("--variant", variant, "asym | iss");
  synth->add_option("--confine", confine,
                    "Targets: i:cell:j | i:X | i:path.json | all:...");
  synth->add_option("--max-iter", max_iter, "CCL iteration cap");
  synth->add_option("--channel", synth_channel, "D | B | BK");
  synth->add_flag("--fit-controller", fit_controller,
                  "Keep the file's gains; fit certificate matrices only");
  synth->add_option("--artifact-out", artifact_out, "Controller artifact path");
  synth->add_option("--out", out_path, "Write the report here");

  auto* sim = app.add_subcommand("simulate", "Closed-loop simulation");
  std::string x0_s = "0,0", csv, svg, noise = "seeded";
  int steps = 10000;
  uint64_t seed = 1;
  bool force = false;
  bool requant = true;
  double delta_dist = 0.0, stop_radius = 1e-6;
  sim->add_option("--file", file, "System description (JSON)")->required();
  sim->add_option("--mode", mode_s, "input | state | disturbed");
  sim->add_option("--x0", x0_s, "Initial state, comma separated")->required();
  sim->add_option("--steps", steps, "Step cap");
  sim->add_option("--seed", seed, "Disturbance seed");
  sim->add_option("--csv", csv, "Trace CSV path");
  sim->add_option("--svg", svg, "Trajectory SVG path (2-D only)");
  sim->add_option("--artifact", artifact, "Controller artifact (JSON)");
  sim->add_flag("--force", force, "Run even when conditions fail");
  sim->add_option("--requantize", requant, "Controller-side requantization");
  sim->add_option("--noise", noise, "seeded | worst");
  sim->add_option("--delta-dist", delta_dist, "Disturbance level (disturbed)");
  sim->add_option("--stop-radius", stop_radius, "Stop when |x| falls below");
  sim->add_option("--out", out_path, "Write the report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (reach->parsed())
      return cmd_reach(file, method, delta, channel_s, out_path);
    if (certify->parsed())
      return cmd_certify(file, eps, delta_param, mode_s, artifact, out_path);
    if (synth->parsed())
      return cmd_synth(file, variant, confine, max_iter, fit_controller,
                       synth_channel, artifact_out, out_path);
    if (sim->parsed())
      return cmd_simulate(file, mode_s, x0_s, steps, seed, csv, svg, artifact,
                          force, requant, noise, delta_dist, stop_radius,
                          out_path);
  } catch (const CertificateInvalid& e) {
    std::cerr << "certificate invalid (pair " << e.cell_i + 1 << ","
              << (e.cell_j >= 0 ? std::to_string(e.cell_j + 1) : "-")
              << "): " << e.what() << "\n";
    return kExitCertificate;
  } catch (const RangeTooSmall& e) {
    std::cerr << "certificate: " << e.what() << "\n";
    return kExitCertificate;
  } catch (const GapViolated& e) {
    std::cerr << "certificate: " << e.what() << "\n";
    return kExitCertificate;
  } catch (const CclStalled& e) {
    std::cerr << "synthesis: " << e.what() << "\n";
    return kExitSynthesis;
  } catch (const FixpointDiverged& e) {
    std::cerr << "synthesis: " << e.what() << "\n";
    return kExitSynthesis;
  } catch (const VerificationFailed& e) {
    std::cerr << "synthesis: " << e.what() << "\n";
    return kExitSynthesis;
  } catch (const SolverFailure& e) {
    std::cerr << "solver: " << e.what() << "\n";
    return kExitSolver;
  } catch (const OutOfDomainError& e) {
    std::cerr << "validation: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "validation: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

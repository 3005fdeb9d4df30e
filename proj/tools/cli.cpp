#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ineqforge/baseline.hpp"
#include "ineqforge/certificates.hpp"
#include "ineqforge/conversions.hpp"
#include "ineqforge/errors.hpp"
#include "ineqforge/json_io.hpp"
#include "ineqforge/lyapunov.hpp"
#include "ineqforge/numeric.hpp"
#include "ineqforge/verify.hpp"

namespace ineqforge::cli {
namespace {

using nlohmann::json;

// Files a command wants to write, collected before anything touches disk.
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;

  void add(const std::string& path, std::string content) {
    if (!path.empty()) files.emplace_back(path, std::move(content));
  }
};

struct Result {
  int code = kExitOk;
  Outputs outputs;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

double to_number(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::logic_error&) {
  }
  fail(ErrorCode::parse_error, "cannot read " + what + " from '" + text + "'");
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(to_number(part, what));
  if (out.empty()) fail(ErrorCode::parse_error, what + " list is empty");
  return out;
}

std::pair<double, double> parse_pair(const std::string& text, const std::string& what) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) fail(ErrorCode::parse_error, what + " must be of the form x:y");
  return {to_number(parts[0], what), to_number(parts[1], what)};
}

json load_json_arg(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      fail(ErrorCode::parse_error, std::string("inline JSON: ") + e.what());
    }
  }
  return read_json_file(text);
}

WitnessParams parse_witness(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() == 2 && parts[0] == "expaV") {
    return WitnessParams::exp_aV(to_number(parts[1], "witness exponent"));
  }
  if (parts.size() == 3 && parts[0] == "expdist") {
    return WitnessParams::exp_dist(to_number(parts[1], "witness coefficient"),
                                   to_number(parts[2], "witness power"));
  }
  fail(ErrorCode::parse_error, "witness must be expaV:a or expdist:a:b, got '" + text + "'");
}

SetFamily parse_family(const std::string& text) {
  const auto parts = split(text, ':');
  if (text == "balls") return SetFamily::balls();
  if (text == "v_levels") return SetFamily::v_levels();
  if (text == "v_levels:level") return SetFamily::v_levels(Enlargement::level);
  if (parts.size() == 2 && parts[0] == "h_levels") {
    return SetFamily::h_levels(to_number(parts[1], "h_levels curvature"));
  }
  fail(ErrorCode::parse_error,
       "set family must be balls, v_levels, v_levels:level or h_levels:c0, got '" + text + "'");
}

BaselineBeta parse_baseline(const std::string& text, int n) {
  const auto parts = split(text, ':');
  if (text == "lebesgue") return BaselineBeta::lebesgue(n);
  if (parts[0] == "bord" && (parts.size() == 2 || parts.size() == 3)) {
    const double theta = to_number(parts[1], "baseline theta");
    const double C = parts.size() == 3 ? to_number(parts[2], "baseline constant") : 1.0;
    return BaselineBeta::bord(n, theta, C);
  }
  fail(ErrorCode::parse_error, "baseline must be lebesgue or bord:theta[:C], got '" + text + "'");
}

std::vector<double> parse_positive_grid(const std::string& text) {
  const GridSpec grid = parse_grid_spec(text);
  auto points = grid.points();
  if (!std::all_of(points.begin(), points.end(), [](double s) { return s > 0.0; })) {
    fail(ErrorCode::parse_error, "grid '" + text + "' must be strictly positive");
  }
  return points;
}

std::string config_hash(const json& config) { return fnv1a_hex(canonical_dump(config)); }

std::string sweep_csv(const RateFunction& rate, std::span<const double> s_grid) {
  std::string out = "s,beta\n";
  for (double s : s_grid) out += format_g17(s) + "," + format_g17(rate.value(s)) + "\n";
  return out;
}

Certificate load_certificate(const std::string& path) { return certificate_from_json(read_json_file(path)); }

// ---------------------------------------------------------------------------

struct CertifyArgs {
  std::string potential;
  std::string route = "main2";
  std::string witness = "expaV:0.5";
  std::string family = "balls";
  std::string baseline = "lebesgue";
  std::string eps_grid;
  bool plain_chaining = false;
  double local_C = 1.0;
  int variant = 1;
  std::string eta = "1:1";
  double a0 = 0.5;
  double c = 1.0;
  double C = 1.0;
  int case_id = 0;
  bool classify = false;
  std::string out;
  std::string csv;
};

Result run_certify(const CertifyArgs& a) {
  const json potential_json = load_json_arg(a.potential);
  const auto spec = potential_json.get<PotentialSpec>();
  spec.validate();

  json config = {{"command", "certify"}, {"potential", spec}, {"route", a.route}};
  Certificate cert;
  if (a.route == "logdensity") {
    LogDensityOptions o;
    o.variant = a.variant;
    std::tie(o.eta_coef, o.eta_power) = parse_pair(a.eta, "eta");
    o.a0 = a.a0;
    o.c = a.c;
    o.C = a.C;
    config.update({{"variant", o.variant}, {"eta", {o.eta_coef, o.eta_power}}, {"a0", o.a0},
                   {"c", o.c}, {"C", o.C}});
    cert = certify_logdensity(spec, o);
  } else if (a.route == "distance") {
    DistanceOptions o;
    o.case_id = a.case_id;
    o.c = a.c;
    o.C = a.C;
    config.update({{"case", o.case_id}, {"c", o.c}, {"C", o.C}});
    cert = certify_distance(spec, o);
  } else {
    const Route route = parse_route(a.route);
    RouteOptions o;
    o.family = parse_family(a.family);
    o.base = parse_baseline(a.baseline, spec.dimension);
    if (!a.eps_grid.empty()) o.eps_grid = parse_list(a.eps_grid, "eps grid");
    o.exact_chaining = !a.plain_chaining;
    o.local_C = a.local_C;
    const WitnessParams params = parse_witness(a.witness);
    config.update({{"witness", params}, {"set_family", o.family}, {"baseline", o.base},
                   {"eps_grid", o.eps_grid}, {"exact_chaining", o.exact_chaining},
                   {"local_C", o.local_C}});
    const LyapunovWitness witness = fit_witness(spec, params);
    cert = certify_route(spec, witness, route, o);
  }
  config["classify"] = a.classify;
  if (a.classify) cert = classify(cert);
  cert.config_hash = config_hash(config);

  Result result;
  result.outputs.add(a.out, canonical_dump(certificate_to_json(cert)));
  result.outputs.add(a.csv, sweep_csv(cert.rate, cert.table.s));
  return result;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string cert;
  std::string potential;
  std::string grid = "auto";
  std::string s = "0.01:1:20:log";
  std::string mode = "auto";
  double kappa_cap = 0.0;
  std::string out;
  std::string csv;
};

// "L:m", or "auto" for the smallest half-width on a fixed ladder whose model
// passes the tail check without underflowing, with m = 2001.
std::pair<double, double> resolve_grid(const std::string& text, const PotentialSpec& spec) {
  constexpr double kAutoPoints = 2001.0;
  if (text == "auto") {
    require(spec.dimension == 1, "the discrete model is one-dimensional");
    for (double L : {2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0}) {
      try {
        (void)build_model(spec, L, static_cast<std::size_t>(kAutoPoints));
        return {L, kAutoPoints};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::tail_mass_too_large && e.code() != ErrorCode::invalid_argument) throw;
      }
    }
    fail(ErrorCode::invalid_argument, "no half-width up to 64 suits " + spec.describe());
  }
  const auto [L, m_real] = parse_pair(text, "grid");
  if (!(m_real >= 1.0) || m_real != std::floor(m_real)) {
    fail(ErrorCode::parse_error, "grid point count must be a positive integer");
  }
  return {L, m_real};
}

Result run_verify(const VerifyArgs& a, std::ostream& out) {
  const Certificate cert = load_certificate(a.cert);
  const auto s_grid = parse_positive_grid(a.s);
  CheckMode mode = cert.normalized() ? CheckMode::absolute : CheckMode::shape_up_to_constant;
  if (a.mode == "absolute") {
    mode = CheckMode::absolute;
  } else if (a.mode == "shape") {
    mode = CheckMode::shape_up_to_constant;
  } else if (a.mode != "auto") {
    fail(ErrorCode::parse_error, "mode must be auto, absolute or shape");
  }
  // An explicit potential wins; otherwise the certificate must carry one.
  const json& recipe = cert.rate.recipe();
  PotentialSpec spec;
  if (!a.potential.empty()) {
    spec = load_json_arg(a.potential).get<PotentialSpec>();
  } else if (recipe.is_object() && recipe.contains("potential")) {
    spec = recipe.at("potential").get<PotentialSpec>();
  } else {
    fail(ErrorCode::invalid_argument,
         "certificate does not record its potential; pass --potential");
  }
  const auto [L, m_real] = resolve_grid(a.grid, spec);
  const DiscreteModel model = build_model(spec, L, static_cast<std::size_t>(m_real));
  const TestBattery battery = make_battery(model);
  std::optional<double> cap;
  if (a.kappa_cap > 0.0) cap = a.kappa_cap;
  const SoundnessReport report = check_certificate(cert, model, battery, s_grid, mode, cap);

  const json config = {{"command", "verify"}, {"certificate", cert.id()}, {"potential", spec},
                       {"grid", {L, m_real}},
                       {"s", a.s}, {"mode", std::string(to_string(mode))},
                       {"kappa_cap", a.kappa_cap}};
  json j = report_to_json(report, config_hash(config));
  j["certificate_id"] = cert.id();

  Result result;
  result.code = report.passed() ? kExitOk : kExitViolations;
  result.outputs.add(a.out, canonical_dump(j));
  result.outputs.add(a.csv, report_csv(report));
  out << "violations: " << report.violations.size();
  if (report.kappa) out << ", kappa: " << format_g17(*report.kappa);
  out << "\n";
  return result;
}

// ---------------------------------------------------------------------------

struct ConvertArgs {
  std::string cert;
  std::string beta;
  std::string to = "fsob";
  std::string u = "10:10000:20:log";
  std::string s = "0.01:1:12:log";
  double C1 = 1.0;
  double C2 = 1.0;
  double c_ls = 0.0;
  double d_ls = 0.0;
  double c_p = 0.0;
  std::string out;
};

RateFunction named_rate(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() == 2 && parts[0] == "lebesgue") {
    const double n_real = to_number(parts[1], "dimension");
    const int n = static_cast<int>(n_real);
    if (n < 1 || n != n_real) fail(ErrorCode::parse_error, "dimension must be a positive integer");
    return RateFunction([n](double log_s) { return -0.5 * n * (std::log(4.0 * std::acos(-1.0)) + log_s); },
                        ClassTag::polynomial(0.5 * n, std::pow(4.0 * std::acos(-1.0), -0.5 * n)), {},
                        {});
  }
  if (parts.size() == 3 && parts[0] == "dlsi") {
    const double c = to_number(parts[1], "c");
    const double cp = to_number(parts[2], "c'");
    if (!(c > 0.0) || !(cp >= 0.0)) fail(ErrorCode::parse_error, "dlsi rate needs c > 0, c' >= 0");
    return RateFunction([c, cp](double log_s) { return std::log(c) + cp * std::exp(-log_s); },
                        ClassTag::exponential(1.0, cp), {{"c", c}, {"c_prime", cp}}, {});
  }
  fail(ErrorCode::parse_error, "rate must be lebesgue:n or dlsi:c:c', got '" + text + "'");
}

Result run_convert(const ConvertArgs& a) {
  json config = {{"command", "convert"}, {"to", a.to}};
  Result result;
  if (a.to == "lsi") {
    const double value = rothaus_tighten(a.c_ls, a.d_ls, a.c_p);
    config.update({{"C_LS", a.c_ls}, {"D_LS", a.d_ls}, {"C_P", a.c_p}});
    const json j = {{"schema_version", kSchemaVersion}, {"C_LS", a.c_ls}, {"D_LS", a.d_ls},
                    {"C_P", a.c_p}, {"C_LSI", value}, {"provenance", provenance_block(config_hash(config))}};
    result.outputs.add(a.out, canonical_dump(j));
    return result;
  }

  if (a.cert.empty() == a.beta.empty()) {
    fail(ErrorCode::invalid_argument, "convert needs exactly one of --cert and --beta");
  }
  RateFunction rate;
  if (!a.cert.empty()) {
    const Certificate cert = load_certificate(a.cert);
    rate = cert.rate;
    config["source"] = cert.id();
  } else {
    rate = named_rate(a.beta);
    config["source"] = a.beta;
  }

  if (a.to == "fsob") {
    const auto u_grid = parse_positive_grid(a.u);
    config.update({{"u", a.u}, {"C1", a.C1}, {"C2", a.C2}});
    std::string csv = "u,F\n";
    for (double u : u_grid) csv += format_g17(u) + "," + format_g17(fsob_from_beta(rate, a.C1, a.C2, u)) + "\n";
    result.outputs.add(a.out, std::move(csv));
  } else if (a.to == "dlsi") {
    const auto s_grid = parse_positive_grid(a.s);
    std::vector<std::pair<double, double>> samples;
    for (double s : s_grid) samples.emplace_back(s, rate.value(s));
    config["s"] = a.s;
    json j = detect_dlsi(samples);
    j["schema_version"] = kSchemaVersion;
    j["provenance"] = provenance_block(config_hash(config));
    result.outputs.add(a.out, canonical_dump(j));
  } else {
    fail(ErrorCode::parse_error, "--to must be fsob, dlsi or lsi");
  }
  return result;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string cert;
  std::string s;
  std::string out;
};

Result run_sweep(const SweepArgs& a) {
  const Certificate cert = load_certificate(a.cert);
  const auto s_grid = parse_positive_grid(a.s);
  Result result;
  result.outputs.add(a.out, sweep_csv(cert.rate, s_grid));
  return result;
}

struct BaselineArgs {
  int n = 1;
  std::string form = "lebesgue";
  std::string s = "0.01:1:20:log";
  std::string out;
};

Result run_baseline(const BaselineArgs& a, std::ostream& out) {
  const BaselineBeta base = parse_baseline(a.form, a.n);
  const auto s_grid = parse_positive_grid(a.s);
  std::string csv = "s,beta\n";
  for (double s : s_grid) csv += format_g17(s) + "," + format_g17(base(s)) + "\n";
  out << base.describe() << ", nash constant " << format_g17(nash_constant(a.n)) << "\n";
  Result result;
  result.outputs.add(a.out, std::move(csv));
  return result;
}

void write_outputs(const Outputs& outputs) {
  for (const auto& [path, content] : outputs.files) write_text_file(path, content);
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certificates for super-Poincare, log-Sobolev and F-Sobolev inequalities", "ineqforge"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(library_version()));

  CertifyArgs certify;
  auto* c = app.add_subcommand("certify", "build a certificate for a potential");
  c->add_option("--potential", certify.potential, "potential JSON file or inline JSON")->required();
  c->add_option("--route", certify.route, "main1, main2, levelset, general, logdensity or distance");
  c->add_option("--witness", certify.witness, "expaV:a or expdist:a:b");
  c->add_option("--set-family", certify.family, "balls, v_levels, v_levels:level or h_levels:c0");
  c->add_option("--baseline", certify.baseline, "lebesgue or bord:theta[:C]");
  c->add_option("--eps-grid", certify.eps_grid, "comma separated values in (0, 1)");
  c->add_flag("--plain-chaining", certify.plain_chaining, "general route without exact chaining");
  c->add_option("--local-C", certify.local_C, "constant of the local rate (general route)");
  c->add_option("--variant", certify.variant, "log-density variant (1 or 2)");
  c->add_option("--eta", certify.eta, "eta(u) = coef * u^power as coef:power");
  c->add_option("--a0", certify.a0, "drift margin for the log-density route");
  c->add_option("--c", certify.c, "exponent constant c");
  c->add_option("--C", certify.C, "prefactor constant C");
  c->add_option("--case", certify.case_id, "curvature case 1 to 4 (0 picks automatically)");
  c->add_flag("--classify", certify.classify, "refine the inequality type from the rate class");
  c->add_option("--out", certify.out, "certificate JSON")->required();
  c->add_option("--csv", certify.csv, "s,beta sweep on the probe grid");

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "check a certificate against the discrete oracle");
  v->add_option("--cert", verify.cert, "certificate JSON")->required();
  v->add_option("--potential", verify.potential, "potential override (file or inline JSON)");
  v->add_option("--grid", verify.grid, "L:m model half-width and point count, or auto");
  v->add_option("--s", verify.s, "s grid from:to:steps[:log]");
  v->add_option("--mode", verify.mode, "auto, absolute or shape");
  v->add_option("--kappa-cap", verify.kappa_cap, "largest admissible kappa in shape mode");
  v->add_option("--out", verify.out, "report JSON")->required();
  v->add_option("--csv", verify.csv, "report CSV");

  ConvertArgs convert;
  auto* k = app.add_subcommand("convert", "move between SPI rates, F-Sobolev and LSI constants");
  k->add_option("--cert", convert.cert, "certificate JSON supplying the rate");
  k->add_option("--beta", convert.beta, "named rate: lebesgue:n or dlsi:c:c'");
  k->add_option("--to", convert.to, "fsob, dlsi or lsi");
  k->add_option("--u", convert.u, "u grid for F");
  k->add_option("--s", convert.s, "s grid for the DLSI fit");
  k->add_option("--C1", convert.C1, "F-Sobolev constant C1");
  k->add_option("--C2", convert.C2, "F-Sobolev constant C2");
  k->add_option("--c-ls", convert.c_ls, "defective LSI constant");
  k->add_option("--d-ls", convert.d_ls, "defect");
  k->add_option("--c-p", convert.c_p, "Poincare constant");
  k->add_option("--out", convert.out, "output file")->required();

  SweepArgs sweep;
  auto* w = app.add_subcommand("sweep", "tabulate a certified rate");
  w->add_option("--cert", sweep.cert, "certificate JSON")->required();
  w->add_option("--s", sweep.s, "s grid from:to:steps[:log]")->required();
  w->add_option("--out", sweep.out, "s,beta CSV")->required();

  BaselineArgs baseline;
  auto* b = app.add_subcommand("baseline", "tabulate a baseline rate");
  b->add_option("--n", baseline.n, "dimension");
  b->add_option("--form", baseline.form, "lebesgue or bord:theta[:C]");
  b->add_option("--s", baseline.s, "s grid from:to:steps[:log]");
  b->add_option("--out", baseline.out, "s,beta CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << library_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    Result result;
    if (c->parsed()) {
      if (!certify.csv.empty() && certify.csv == certify.out) {
        fail(ErrorCode::invalid_argument, "--out and --csv must differ");
      }
      result = run_certify(certify);
    } else if (v->parsed()) {
      if (!verify.csv.empty() && verify.csv == verify.out) {
        fail(ErrorCode::invalid_argument, "--out and --csv must differ");
      }
      result = run_verify(verify, out);
    } else if (k->parsed()) {
      result = run_convert(convert);
    } else if (w->parsed()) {
      result = run_sweep(sweep);
    } else {
      result = run_baseline(baseline, out);
    }
    write_outputs(result.outputs);
    return result.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitInputError;
}

}  // namespace ineqforge::cli

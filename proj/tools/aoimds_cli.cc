// aoimds command-line front end. Links only against the C interface.
//
// Exit codes: 0 success, 2 validation error, 3 degenerate system or
// simulation without deliveries, 1 internal failure.

#include <aoimds/aoimds.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;
constexpr int kExitDegenerate = 3;

struct CliError {
  int code;
  std::string message;
};

int exit_code_for(aoimds_status s) {
  switch (s) {
    case AOIMDS_OK:
      return kExitOk;
    case AOIMDS_ERR_DOMAIN:
      return kExitDegenerate;
    case AOIMDS_ERR_INTERNAL:
      return kExitInternal;
    default:
      return kExitValidation;
  }
}

void check(aoimds_status s) {
  if (s != AOIMDS_OK) throw CliError{exit_code_for(s), aoimds_last_error()};
}

std::string fmt(double v) {
  char buf[64];
  aoimds_format_double(v, buf, sizeof(buf));
  return buf;
}

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isinf(v)) return "divergent";
  return nullptr;
}

// Shared flags.
struct Options {
  double alpha = 0.2;
  double beta = 0.8;
  double eps0 = 0.2;
  double eps1 = 0.9;
  std::string channel_file;
  std::int64_t sources = 0;
  std::int64_t ell = 1;
  int n = 0;
  int k = 0;
  std::optional<std::int64_t> source;
  int k_min = 0;
  int k_max = 0;
  bool closed = false;
  std::string config_path;
  std::string out = "-";
  std::string format = "csv";
};

aoimds_ge_params channel_of(const Options& o) {
  aoimds_ge_params p{o.alpha, o.beta, o.eps0, o.eps1};
  if (!o.channel_file.empty()) {
    std::ifstream in(o.channel_file);
    if (!in) throw CliError{kExitValidation, "cannot read " + o.channel_file};
    std::stringstream ss;
    ss << in.rdbuf();
    check(aoimds_ge_from_json(ss.str().c_str(), &p));
  }
  check(aoimds_ge_validate(&p));
  return p;
}

json channel_json(const aoimds_ge_params& p) {
  return {{"alpha", p.alpha}, {"beta", p.beta}, {"eps0", p.eps0}, {"eps1", p.eps1}};
}

json envelope(const char* command, const aoimds_ge_params& p) {
  return {{"schema_version", 1}, {"command", command}, {"channel", channel_json(p)}};
}

int worker_threads() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("AOI_MDS_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1) {
      throw CliError{kExitValidation, "AOI_MDS_THREADS must be a positive integer"};
    }
    hw = std::min<long>(hw, cap);
  }
  return hw;
}

void emit(const Options& o, const std::string& text) {
  if (o.out == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw CliError{kExitValidation, "cannot write " + o.out};
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void require_positive(std::int64_t v, const char* flag) {
  if (v < 1) throw CliError{kExitValidation, std::string(flag) + " must be at least 1"};
}

// ---- pmf ------------------------------------------------------------------

int cmd_pmf(const Options& o) {
  const aoimds_ge_params p = channel_of(o);
  require_positive(o.n, "--n");
  const auto len = static_cast<size_t>(o.n) + 1;
  std::vector<double> dp(len);
  check(aoimds_erasure_pmf(&p, o.n, AOIMDS_PMF_DYNAMIC_PROGRAM, dp.data(), len));
  std::vector<double> closed;
  if (o.closed) {
    if (o.n > aoimds_closed_form_max_n()) {
      throw CliError{kExitValidation, "--closed requires n <= " +
                                          std::to_string(aoimds_closed_form_max_n())};
    }
    closed.resize(len);
    check(aoimds_erasure_pmf(&p, o.n, AOIMDS_PMF_CLOSED_FORM, closed.data(), len));
  }

  if (o.format == "json") {
    json j = envelope("pmf", p);
    j["n"] = o.n;
    j["probs"] = dp;
    if (o.closed) j["probs_closed"] = closed;
    emit(o, dump(j));
    return kExitOk;
  }
  std::string out = o.closed ? "e,P,P_closed\n" : "e,P\n";
  for (size_t e = 0; e < len; ++e) {
    out += std::to_string(e) + "," + fmt(dp[e]);
    if (o.closed) out += "," + fmt(closed[e]);
    out += "\n";
  }
  emit(o, out);
  return kExitOk;
}

// ---- bep ------------------------------------------------------------------

int cmd_bep(const Options& o) {
  const aoimds_ge_params p = channel_of(o);
  require_positive(o.n, "--n");
  require_positive(o.k, "--k");
  if (o.k > o.n) throw CliError{kExitValidation, "--k must not exceed --n"};
  double bep = 0.0;
  check(aoimds_bep_mds(&p, o.n, o.k, &bep));
  if (o.format == "json") {
    json j = envelope("bep", p);
    j["n"] = o.n;
    j["k"] = o.k;
    j["bep"] = bep;
    emit(o, dump(j));
  } else {
    emit(o, "n,k,bep\n" + std::to_string(o.n) + "," + std::to_string(o.k) + "," +
                fmt(bep) + "\n");
  }
  return kExitOk;
}

// ---- analyze --------------------------------------------------------------

int cmd_analyze(const Options& o) {
  const aoimds_ge_params p = channel_of(o);
  require_positive(o.sources, "--K");
  require_positive(o.ell, "--ell");
  require_positive(o.n, "--n");
  const int k = o.k > 0 ? o.k : o.n;
  const aoimds_system sys{o.sources, o.ell, o.n, k};
  const bool divisible = o.sources % k == 0;
  if (o.source && !divisible) {
    throw CliError{kExitValidation,
                   "per-source exact age needs k to divide K (k=" + std::to_string(k) +
                       ", K=" + std::to_string(o.sources) + ")"};
  }
  if (o.source && (*o.source < 0 || *o.source >= o.sources)) {
    throw CliError{kExitValidation, "--source must lie in [0, K)"};
  }

  double pe = 0.0;
  check(aoimds_marginal_erasure_prob(&p, &pe));
  aoimds_aoi unc_exact{}, unc_large{}, approx{};
  check(aoimds_uncoded_aoi(o.sources, o.ell, pe, AOIMDS_UNCODED_EXACT, &unc_exact));
  check(aoimds_uncoded_aoi(o.sources, o.ell, pe, AOIMDS_UNCODED_LARGE_K, &unc_large));
  aoimds_events ev{};
  check(aoimds_event_probs(&sys, &p, &ev));
  int valid = 0;
  double bound = 0.0;
  check(aoimds_coded_aoi_approx(&sys, &p, &approx, &valid, &bound));

  // Exact per-source values: the requested source, or one representative per
  // block position when the positions are fixed.
  std::vector<std::int64_t> sources;
  if (o.source) {
    sources.push_back(*o.source);
  } else if (divisible) {
    for (int i = 0; i < k; ++i) sources.push_back(i);
  }
  std::vector<aoimds_aoi> exact(sources.size());
  for (size_t i = 0; i < sources.size(); ++i) {
    check(aoimds_coded_aoi_exact(&sys, &p, sources[i], &exact[i]));
  }

  if (o.format == "json") {
    json j = envelope("analyze", p);
    j["system"] = {{"K", o.sources}, {"ell", o.ell}, {"n", o.n}, {"k", k}};
    j["erasure_prob"] = pe;
    j["uncoded"] = {{"exact", num(unc_exact.mean_aoi)},
                    {"large_k", num(unc_large.mean_aoi)}};
    j["events"] = {{"p_a", ev.p_a}, {"p_b", ev.p_b}, {"p_c", ev.p_c}};
    json rows = json::array();
    for (size_t i = 0; i < sources.size(); ++i) {
      rows.push_back({{"source", sources[i]},
                      {"position", sources[i] % k},
                      {"mean_aoi", num(exact[i].mean_aoi)}});
    }
    j["coded"] = {{"approx", num(approx.mean_aoi)},
                  {"exact", rows},
                  {"large_k_bound", num(bound)},
                  {"large_k_valid", valid != 0}};
    emit(o, dump(j));
    return kExitOk;
  }
  std::string out = "quantity,source,value\n";
  const auto row = [&out](const std::string& q, const std::string& src,
                          const std::string& v) { out += q + "," + src + "," + v + "\n"; };
  row("erasure_prob", "", fmt(pe));
  row("uncoded_exact", "", fmt(unc_exact.mean_aoi));
  row("uncoded_large_k", "", fmt(unc_large.mean_aoi));
  row("p_a", "", fmt(ev.p_a));
  row("p_b", "", fmt(ev.p_b));
  row("p_c", "", fmt(ev.p_c));
  row("coded_approx", "", fmt(approx.mean_aoi));
  for (size_t i = 0; i < sources.size(); ++i) {
    row("coded_exact", std::to_string(sources[i]), fmt(exact[i].mean_aoi));
  }
  row("large_k_bound", "", fmt(bound));
  row("large_k_valid", "", valid ? "1" : "0");
  emit(o, out);
  return kExitOk;
}

// ---- sweep ----------------------------------------------------------------

int cmd_sweep(const Options& o) {
  const aoimds_ge_params p = channel_of(o);
  require_positive(o.sources, "--K");
  require_positive(o.ell, "--ell");
  require_positive(o.n, "--n");
  const int k_min = o.k_min > 0 ? o.k_min : 1;
  const int k_max = o.k_max > 0 ? o.k_max : o.n;
  if (k_min > k_max || k_max > o.n) {
    throw CliError{kExitValidation, "need 1 <= k-min <= k-max <= n"};
  }

  aoimds_sweep* sweep = nullptr;
  check(aoimds_sweep_run(&p, o.n, o.sources, o.ell, k_min, k_max, worker_threads(),
                         &sweep));
  std::unique_ptr<aoimds_sweep, void (*)(aoimds_sweep*)> guard(sweep,
                                                               aoimds_sweep_destroy);
  std::vector<aoimds_sweep_row> rows(aoimds_sweep_size(sweep));
  for (size_t i = 0; i < rows.size(); ++i) check(aoimds_sweep_row_at(sweep, i, &rows[i]));
  aoimds_sweep_summary s{};
  check(aoimds_sweep_get_summary(sweep, &s));

  if (o.format == "json") {
    json j = envelope("sweep", p);
    j["system"] = {{"K", o.sources}, {"ell", o.ell}, {"n", o.n}};
    json arr = json::array();
    for (const aoimds_sweep_row& r : rows) {
      arr.push_back({{"n", r.n},
                     {"k", r.k},
                     {"rate", r.rate},
                     {"p_c", r.p_c},
                     {"aoi_approx", num(r.aoi_approx)},
                     {"aoi_gaussian", r.has_gaussian ? num(r.aoi_gaussian) : json(nullptr)},
                     {"aoi_uncoded", num(r.aoi_uncoded)},
                     {"gain", num(r.gain)},
                     {"c_n", r.has_gaussian ? num(r.c_n) : json(nullptr)},
                     {"region", r.has_gaussian ? json(r.region) : json(nullptr)}});
    }
    j["rows"] = arr;
    j["summary"] = {{"k_star", s.k_star},     {"rate", s.rate},
                    {"aoi_star", num(s.aoi_star)}, {"aoi_uncoded", num(s.aoi_uncoded)},
                    {"gain", num(s.gain)},    {"ceiling", s.ceiling},
                    {"c_eps", s.c_eps}};
    emit(o, dump(j));
    return kExitOk;
  }
  std::string out = "n,k,rate,p_c,aoi_approx,aoi_gaussian,aoi_uncoded,gain,c_n,region\n";
  for (const aoimds_sweep_row& r : rows) {
    out += std::to_string(r.n) + "," + std::to_string(r.k) + "," + fmt(r.rate) + "," +
           fmt(r.p_c) + "," + fmt(r.aoi_approx) + "," +
           (r.has_gaussian ? fmt(r.aoi_gaussian) : "") + "," + fmt(r.aoi_uncoded) +
           "," + fmt(r.gain) + "," + (r.has_gaussian ? fmt(r.c_n) : "") + "," +
           (r.has_gaussian ? std::to_string(r.region) : "") + "\n";
  }
  out += "# argmin k=" + std::to_string(s.k_star) + " rate=" + fmt(s.rate) +
         " aoi=" + fmt(s.aoi_star) + " gain=" + fmt(s.gain) +
         " ceiling=" + fmt(s.ceiling) + " c_eps=" + fmt(s.c_eps) + "\n";
  emit(o, out);
  return kExitOk;
}

// ---- simulate -------------------------------------------------------------

int cmd_simulate(const Options& o) {
  std::ifstream in(o.config_path);
  if (!in) throw CliError{kExitValidation, "cannot read " + o.config_path};
  std::stringstream ss;
  ss << in.rdbuf();

  aoimds_simulation* sim = nullptr;
  check(aoimds_simulation_run_json(ss.str().c_str(), worker_threads(), &sim));
  std::unique_ptr<aoimds_simulation, void (*)(aoimds_simulation*)> guard(
      sim, aoimds_simulation_destroy);
  char* text = nullptr;
  check(o.format == "json" ? aoimds_simulation_report_json(sim, &text)
                           : aoimds_simulation_report_csv(sim, &text));
  const std::string report(text);
  aoimds_string_free(text);
  emit(o, report);
  if (aoimds_simulation_no_delivery(sim)) {
    std::cerr << "warning: a tracked source received no update\n";
    return kExitDegenerate;
  }
  return kExitOk;
}

// ---- optimize -------------------------------------------------------------

int cmd_optimize(const Options& o) {
  const aoimds_ge_params p = channel_of(o);
  require_positive(o.sources, "--K");
  require_positive(o.ell, "--ell");
  require_positive(o.n, "--n");
  double pe = 0.0;
  check(aoimds_marginal_erasure_prob(&p, &pe));
  aoimds_gain g{};
  check(aoimds_coding_gain(&p, o.n, o.sources, o.ell, &g));
  const double rate = static_cast<double>(g.k_star) / o.n;
  const double asymptotic_k = o.n * (1.0 - pe);

  if (o.format == "json") {
    json j = envelope("optimize", p);
    j["system"] = {{"K", o.sources}, {"ell", o.ell}, {"n", o.n}};
    j["k_star"] = g.k_star;
    j["rate"] = rate;
    j["aoi_star"] = num(g.coded.mean_aoi);
    j["aoi_uncoded"] = num(g.uncoded.mean_aoi);
    j["gain"] = num(g.gain);
    j["ceiling"] = g.ceiling;
    j["asymptotic_k"] = asymptotic_k;
    emit(o, dump(j));
    return kExitOk;
  }
  emit(o, "n,k_star,rate,aoi_star,aoi_uncoded,gain,ceiling,asymptotic_k\n" +
              std::to_string(o.n) + "," + std::to_string(g.k_star) + "," + fmt(rate) +
              "," + fmt(g.coded.mean_aoi) + "," + fmt(g.uncoded.mean_aoi) + "," +
              fmt(g.gain) + "," + fmt(g.ceiling) + "," + fmt(asymptotic_k) + "\n");
  return kExitOk;
}

void add_channel(CLI::App* cmd, Options& o) {
  auto* a = cmd->add_option("--alpha", o.alpha, "P(Good -> Bad)")->capture_default_str();
  auto* b = cmd->add_option("--beta", o.beta, "P(Bad -> Good)")->capture_default_str();
  auto* e0 = cmd->add_option("--eps0", o.eps0, "erasure prob. in Good")->capture_default_str();
  auto* e1 = cmd->add_option("--eps1", o.eps1, "erasure prob. in Bad")->capture_default_str();
  cmd->add_option("--channel", o.channel_file, "JSON file with alpha, beta, eps0, eps1")
      ->check(CLI::ExistingFile)
      ->excludes(a)
      ->excludes(b)
      ->excludes(e0)
      ->excludes(e1);
}

void add_output(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "output file, - for stdout")->capture_default_str();
  cmd->add_option("--format", o.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void add_system(CLI::App* cmd, Options& o) {
  cmd->add_option("--K", o.sources, "number of sources")->required();
  cmd->add_option("--ell", o.ell, "packet length in slots")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean age of information under round-robin MDS coding"};
  app.require_subcommand(1);
  Options o;

  auto* pmf = app.add_subcommand("pmf", "erasure-count pmf of an n-packet window");
  add_channel(pmf, o);
  pmf->add_option("--n", o.n, "window length")->required();
  pmf->add_flag("--closed", o.closed, "add the closed-form column");
  add_output(pmf, o);

  auto* bep = app.add_subcommand("bep", "block error probability of an (n,k) MDS code");
  add_channel(bep, o);
  bep->add_option("--n", o.n, "block length")->required();
  bep->add_option("--k", o.k, "data packets per block")->required();
  add_output(bep, o);

  auto* analyze = app.add_subcommand("analyze", "uncoded and coded mean age");
  add_channel(analyze, o);
  add_system(analyze, o);
  analyze->add_option("--n", o.n, "block length")->required();
  analyze->add_option("--k", o.k, "data packets per block (default n)");
  analyze->add_option("--source", o.source, "report the exact age of this source only");
  add_output(analyze, o);

  auto* sweep = app.add_subcommand("sweep", "approximate age for every k at fixed n");
  add_channel(sweep, o);
  add_system(sweep, o);
  sweep->add_option("--n", o.n, "block length")->required();
  sweep->add_option("--k-min", o.k_min, "smallest k (default 1)");
  sweep->add_option("--k-max", o.k_max, "largest k (default n)");
  add_output(sweep, o);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run from a JSON config");
  simulate->add_option("config", o.config_path, "simulation config (JSON)")->required();
  add_output(simulate, o);

  auto* optimize = app.add_subcommand("optimize", "age-optimal k and coding gain");
  add_channel(optimize, o);
  add_system(optimize, o);
  optimize->add_option("--n", o.n, "block length")->required();
  add_output(optimize, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (pmf->parsed()) return cmd_pmf(o);
    if (bep->parsed()) return cmd_bep(o);
    if (analyze->parsed()) return cmd_analyze(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (simulate->parsed()) return cmd_simulate(o);
    if (optimize->parsed()) return cmd_optimize(o);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

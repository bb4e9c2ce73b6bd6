// sbmkit command-line front end.
#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sbmkit/bisection.hpp"
#include "sbmkit/bp.hpp"
#include "sbmkit/errors.hpp"
#include "sbmkit/io.hpp"
#include "sbmkit/moments.hpp"
#include "sbmkit/nb.hpp"
#include "sbmkit/plot.hpp"
#include "sbmkit/posterior.hpp"
#include "sbmkit/sbm.hpp"
#include "sbmkit/sweep.hpp"
#include "sbmkit/tree.hpp"

using namespace sbmkit;

namespace {

constexpr int kExitParam = 2;
constexpr int kExitIo = 3;
constexpr int kExitNoConvergence = 4;

struct ModelFlags {
  std::size_t n = 1000;
  std::size_t q = 2;
  double c_in = 5.0;
  double c_out = 1.0;
  std::optional<double> c;  // planted coloring when set
  std::uint64_t seed = 1;
};

void add_model_flags(CLI::App* app, ModelFlags& m) {
  app->add_option("--n", m.n, "vertex count");
  app->add_option("--q", m.q, "number of groups");
  app->add_option("--cin", m.c_in, "within-group affinity");
  app->add_option("--cout", m.c_out, "between-group affinity");
  app->add_option("--c", m.c, "mean degree; selects the planted coloring model (c_in = 0)");
  app->add_option("--seed", m.seed, "RNG seed");
}

SbmParams model_params(const ModelFlags& m) {
  if (m.c) return SbmParams::planted_coloring(m.q, m.n, *m.c);
  return SbmParams::symmetric(m.q, m.n, m.c_in, m.c_out);
}

// Writes to path, or stdout when empty. Buffered so a failed run leaves no file.
void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << content;
  if (!os) throw IoError("write failed: " + path);
}

InitMode init_from(const std::string& s) {
  const auto m = parse_init_mode(s);
  if (!m) throw ParameterError("unknown init mode '" + s + "'");
  return *m;
}

template <class T>
std::vector<T> parse_csv_list(const std::string& s) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::stringstream is(item);
    T v{};
    if (!(is >> v)) throw ParameterError("bad list entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

int cmd_gen(const std::string& model, const ModelFlags& m, std::size_t d, double c_er, bool balanced,
            const std::string& out, const std::string& labels_out) {
  std::ostringstream graph;
  if (model == "sbm") {
    const SbmSample s = sample_sbm(model_params(m), m.seed, balanced);
    write_edge_list(graph, s.graph);
    std::ostringstream labels;
    write_labels(labels, s.labels);
    emit(out, graph.str());
    if (!labels_out.empty()) emit(labels_out, labels.str());
    return 0;
  }
  if (model == "er") {
    write_edge_list(graph, sample_er(m.n, c_er, m.seed));
  } else if (model == "regular") {
    write_edge_list(graph, sample_regular(m.n, d, m.seed));
  } else {
    throw ParameterError("unknown model '" + model + "' (sbm, er, regular)");
  }
  emit(out, graph.str());
  return 0;
}

struct Instance {
  Graph graph;
  Labels truth;
  SbmParams params;
};

Instance load_or_sample(const ModelFlags& m, const std::string& graph_path, const std::string& labels_path) {
  SbmParams p = model_params(m);
  if (graph_path.empty()) {
    SbmSample s = sample_sbm(p, m.seed);
    return {std::move(s.graph), std::move(s.labels), p};
  }
  Graph g = load_edge_list(graph_path);
  Labels truth;
  if (!labels_path.empty()) {
    truth = load_labels(labels_path, p.q());
    if (truth.size() != g.num_vertices()) throw InputError("label count differs from vertex count");
  }
  p = p.with_n(g.num_vertices());
  return {std::move(g), std::move(truth), p};
}

int cmd_bp(const ModelFlags& m, const std::string& graph_path, const std::string& labels_path,
           const std::string& init_name, double noise, double tol, std::size_t max_sweeps, const std::string& out) {
  const Instance inst = load_or_sample(m, graph_path, labels_path);
  InitSpec init;
  init.mode = init_from(init_name);
  init.noise = noise;
  init.seed = derive_seed(m.seed, 1);
  if (init.mode == InitMode::planted) {
    if (inst.truth.empty()) throw ParameterError("planted init needs labels");
    init.planted = inst.truth;
  }
  BpOptions opts;
  opts.tol = tol;
  opts.max_sweeps = max_sweeps;
  opts.order_seed = derive_seed(m.seed, 2);
  const BpResult r = run_bp(inst.graph, inst.params, init, opts);

  std::ostringstream os;
  os << "vertex";
  for (std::size_t s = 0; s < inst.params.q(); ++s) os << ",p_" << s;
  os << ",hard_label\n";
  for (Vertex v = 0; v < inst.graph.num_vertices(); ++v) {
    os << v;
    for (double x : r.marginals.at(v)) os << ',' << format_number(x);
    os << ',' << r.hard_labels[v] << '\n';
  }
  emit(out, os.str());
  std::cerr << "converged=" << (r.converged ? "true" : "false") << " sweeps=" << r.sweeps
            << " bethe_f=" << format_number(r.bethe_free_energy);
  if (!inst.truth.empty()) std::cerr << " overlap=" << format_number(overlap(r.hard_labels, inst.truth, inst.params.q()));
  std::cerr << '\n';
  return r.converged ? 0 : kExitNoConvergence;
}

int cmd_spectrum(const ModelFlags& m, const std::string& graph_path, const std::string& labels_path, std::size_t k,
                 double tol, bool full, const std::string& out, const std::string& embedding_out) {
  const Instance inst = load_or_sample(m, graph_path, labels_path);
  const Graph& g = inst.graph;
  const double c = g.num_vertices() ? 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(g.num_vertices()) : 0.0;
  NbOperator op(g);
  SpectrumOptions o;
  o.k = k;
  o.tol = tol;
  o.seed = m.seed;
  if (full) o.path = SolverPath::dense;
  const Spectrum s = leading_spectrum(op, o);

  std::ostringstream os;
  os << "re,im,is_outlier\n";
  auto row = [&](cplx z) {
    os << format_number(z.real()) << ',' << format_number(z.imag()) << ',' << (is_outlier(z, c, 0.05) ? 1 : 0) << '\n';
  };
  if (full) {
    for (cplx z : s.full) row(z);
  } else {
    for (const Eigenpair& ep : s.leading) row(ep.value);
  }
  emit(out, os.str());

  if (!embedding_out.empty()) {
    NbClusterOptions co;
    co.seed = m.seed;
    const NbClustering cl = nb_cluster(g, inst.params.q(), s, co);
    std::ostringstream es;
    es << "vertex";
    for (std::size_t d = 0; d < cl.dims; ++d) es << ",coord_" << d + 1;
    es << ",label\n";
    for (std::size_t v = 0; v < g.num_vertices(); ++v) {
      es << v;
      for (std::size_t d = 0; d < cl.dims; ++d) es << ',' << format_number(cl.embedding[v * cl.dims + d]);
      es << ',' << cl.labels[v] << '\n';
    }
    emit(embedding_out, es.str());
    if (!inst.truth.empty()) {
      std::cerr << "overlap=" << format_number(overlap(cl.labels, inst.truth, inst.params.q()))
                << (cl.low_confidence ? " low_confidence" : "") << '\n';
    }
  }
  std::cerr << "converged=" << (s.converged ? "true" : "false") << '\n';
  return s.converged ? 0 : kExitNoConvergence;
}

int cmd_tree(double c, double lambda, std::size_t q, const std::string& depths, std::size_t trials,
             const std::string& model, const std::string& estimators, std::uint64_t seed, const std::string& out) {
  CurveOptions o;
  if (model == "fixed") {
    o.model = Offspring::fixed;
  } else if (model == "poisson") {
    o.model = Offspring::poisson;
  } else {
    throw ParameterError("unknown offspring model '" + model + "'");
  }
  o.estimators.clear();
  std::stringstream ss(estimators);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "majority") {
      o.estimators.push_back(Estimator::majority);
    } else if (item == "bp") {
      o.estimators.push_back(Estimator::bp);
    } else {
      throw ParameterError("unknown estimator '" + item + "'");
    }
  }
  const auto curve = reconstruction_curve(c, lambda, q, parse_csv_list<std::size_t>(depths), trials, seed, o);
  std::ostringstream os;
  write_curve_csv(os, curve);
  emit(out, os.str());
  if (o.model == Offspring::poisson && !curve.empty()) {
    for (const CurvePoint& pt : curve) {
      std::cerr << "depth " << pt.depth << " survival " << format_number(static_cast<double>(pt.trials) / static_cast<double>(pt.attempted)) << '\n';
    }
  }
  return 0;
}

int cmd_sweep(const std::string& config, const std::string& out) {
  if (config.empty()) throw ParameterError("sweep needs --config");
  SweepConfig cfg = load_sweep_config(config);
  if (!out.empty()) cfg.out = out;
  if (cfg.out.empty()) throw ParameterError("sweep needs an output path (out = ... or --out)");
  const SweepResult r = run_sweep_to_files(cfg);
  if (!r.summary.empty()) {
    if (const auto x = free_energy_crossing(r.summary)) std::cerr << "free-energy crossing at c=" << format_number(*x) << '\n';
  }
  return r.all_converged ? 0 : kExitNoConvergence;
}

int cmd_bisect(std::size_t n, std::size_t d, std::size_t pairs, std::uint64_t seed, const std::string& out) {
  std::ostringstream os;
  os << "pair,cut_a,cut_b,fraction_a,fraction_b,overlap\n";
  double total = 0.0;
  double total_overlap = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const Graph g = sample_regular(n, d, derive_seed(seed, k));
    const Bisection a = min_bisection_local_search(g, derive_seed(seed, 1000 + 2 * k));
    const Bisection b = min_bisection_local_search(g, derive_seed(seed, 1001 + 2 * k));
    const double m = static_cast<double>(g.num_edges());
    const double ov = overlap(a.side, b.side, 2);
    os << k << ',' << a.cut << ',' << b.cut << ',' << format_number(a.cut / m) << ',' << format_number(b.cut / m) << ','
       << format_number(ov) << '\n';
    total += (a.cut + b.cut) / (2.0 * m);
    total_overlap += ov;
  }
  emit(out, os.str());
  std::cerr << "mean_cut_fraction=" << format_number(total / static_cast<double>(pairs))
            << " mean_overlap=" << format_number(total_overlap / static_cast<double>(pairs)) << '\n';
  return 0;
}

int cmd_moments(double c, std::optional<double> lambda, double lmin, double lmax, std::size_t steps, std::size_t q,
                std::uint64_t seed, bool onset, const std::string& out) {
  RateOptions o;
  o.seed = seed;
  std::vector<RateScanRow> rows;
  std::vector<double> lambdas;
  if (lambda) {
    lambdas.push_back(*lambda);
  } else {
    if (steps < 2) throw ParameterError("--steps must be >= 2");
    for (std::size_t i = 0; i < steps; ++i) lambdas.push_back(lmin + (lmax - lmin) * static_cast<double>(i) / static_cast<double>(steps - 1));
  }
  for (double l : lambdas) {
    RateScanRow row;
    row.c = c;
    row.lambda = l;
    row.q = q;
    row.max = maximize_rate(c, l, q, o);
    row.verdict = contiguity_verdict(row.max);
    rows.push_back(std::move(row));
  }
  std::ostringstream os;
  write_rate_scan_csv(os, rows);
  emit(out, os.str());
  if (onset) {
    const double lo = c * lmin * lmin;
    const double hi = c * lmax * lmax;
    std::cerr << "onset c*lambda^2=" << format_number(rate_onset(q, lo, hi, 1e-6, o)) << '\n';
  }
  return 0;
}

int cmd_plot(const std::string& kind, const std::string& in, const std::string& out, std::optional<double> c,
             const std::string& title) {
  const auto k = parse_plot_kind(kind);
  if (!k) throw ParameterError("unknown plot kind '" + kind + "' (spectrum, sweep, curve)");
  if (in.empty() || out.empty()) throw ParameterError("plot needs --in and --out");
  PlotSpec spec;
  spec.kind = *k;
  spec.c = c;
  spec.title = title;
  emit_plot(in, out, spec);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic block model inference toolkit"};
  app.require_subcommand(1);

  ModelFlags model;
  std::string out;
  std::string graph_path;
  std::string labels_path;
  std::string init_name = "random";
  double noise = 1e-3;
  double tol = 1e-6;
  std::size_t max_sweeps = 1000;

  auto* gen = app.add_subcommand("gen", "sample a graph");
  std::string gen_model = "sbm";
  std::size_t degree = 3;
  double c_er = 3.0;
  bool balanced = false;
  std::string labels_out;
  add_model_flags(gen, model);
  gen->add_option("--model", gen_model, "sbm, er or regular");
  gen->add_option("--d", degree, "degree for regular graphs");
  gen->add_option("--mean-degree", c_er, "mean degree for er");
  gen->add_flag("--balanced", balanced, "exactly n/q vertices per group");
  gen->add_option("--out", out, "edge list path");
  gen->add_option("--labels-out", labels_out, "label file path");

  auto* bp = app.add_subcommand("bp", "run belief propagation once");
  add_model_flags(bp, model);
  bp->add_option("--graph", graph_path, "edge list (default: sample from the model flags)");
  bp->add_option("--labels", labels_path, "true labels, for overlap and planted init");
  bp->add_option("--init", init_name, "random, uniform or planted");
  bp->add_option("--noise", noise, "init perturbation");
  bp->add_option("--tol", tol, "convergence tolerance");
  bp->add_option("--max-sweeps", max_sweeps, "sweep cap");
  bp->add_option("--out", out, "marginals csv");

  auto* spectrum = app.add_subcommand("spectrum", "non-backtracking spectrum and clustering");
  std::size_t k = 4;
  bool full = false;
  std::string embedding_out;
  add_model_flags(spectrum, model);
  spectrum->add_option("--graph", graph_path, "edge list (default: sample from the model flags)");
  spectrum->add_option("--labels", labels_path, "true labels, for overlap");
  spectrum->add_option("--k", k, "number of leading eigenvalues");
  spectrum->add_option("--tol", tol, "eigensolver tolerance");
  spectrum->add_flag("--full", full, "dump the full spectrum (dense solver)");
  spectrum->add_option("--out", out, "spectrum csv");
  spectrum->add_option("--embedding-out", embedding_out, "embedding csv");

  auto* tree = app.add_subcommand("tree", "tree reconstruction curves");
  double tc = 2.0;
  double tlambda = 0.28;
  std::size_t tq = 2;
  std::string depths = "1,2,3,4,5,6,7,8,9,10,11,12";
  std::size_t trials = 5000;
  std::string offspring = "fixed";
  std::string estimators = "majority,bp";
  std::uint64_t tseed = 1;
  tree->add_option("--c", tc, "offspring parameter");
  tree->add_option("--lambda", tlambda, "copy probability");
  tree->add_option("--q", tq, "number of colors");
  tree->add_option("--depths", depths, "comma-separated depths");
  tree->add_option("--trials", trials, "Monte Carlo trials");
  tree->add_option("--model", offspring, "fixed or poisson");
  tree->add_option("--estimator", estimators, "majority, bp or both");
  tree->add_option("--seed", tseed, "RNG seed");
  tree->add_option("--out", out, "curve csv");

  auto* sweep = app.add_subcommand("sweep", "config-driven BP grid");
  std::string config;
  sweep->add_option("--config", config, "key=value config file")->required();
  sweep->add_option("--out", out, "override the config's out path");

  auto* bisect = app.add_subcommand("bisect", "local-search bisections of random regular graphs");
  std::size_t bn = 300;
  std::size_t bd = 3;
  std::size_t pairs = 20;
  std::uint64_t bseed = 1;
  bisect->add_option("--n", bn, "vertex count");
  bisect->add_option("--d", bd, "degree");
  bisect->add_option("--pairs", pairs, "graphs, each bisected twice");
  bisect->add_option("--seed", bseed, "RNG seed");
  bisect->add_option("--out", out, "csv path");

  auto* moments = app.add_subcommand("moments", "second-moment rate function scan");
  double mc = 1.0;
  std::optional<double> mlambda;
  double lmin = 0.0;
  double lmax = 1.5;
  std::size_t steps = 31;
  std::size_t mq = 2;
  std::uint64_t mseed = 1;
  bool onset = false;
  moments->add_option("--c", mc, "mean degree");
  moments->add_option("--lambda", mlambda, "single lambda (otherwise a scan)");
  moments->add_option("--lambda-min", lmin, "scan start");
  moments->add_option("--lambda-max", lmax, "scan end");
  moments->add_option("--steps", steps, "scan points");
  moments->add_option("--q", mq, "number of groups");
  moments->add_option("--seed", mseed, "restart seed");
  moments->add_flag("--onset", onset, "report where f* first exceeds zero in the scan range");
  moments->add_option("--out", out, "scan csv");

  auto* plot = app.add_subcommand("plot", "render a csv as svg");
  std::string kind = "spectrum";
  std::string in;
  std::optional<double> pc;
  std::string title;
  plot->add_option("--kind", kind, "spectrum, sweep or curve");
  plot->add_option("--in", in, "input csv");
  plot->add_option("--out", out, "output svg");
  plot->add_option("--c", pc, "draw the sqrt(c) circle (spectrum)");
  plot->add_option("--title", title, "plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParam;
  }

  try {
    if (*gen) return cmd_gen(gen_model, model, degree, c_er, balanced, out, labels_out);
    if (*bp) return cmd_bp(model, graph_path, labels_path, init_name, noise, tol, max_sweeps, out);
    if (*spectrum) return cmd_spectrum(model, graph_path, labels_path, k, tol, full, out, embedding_out);
    if (*tree) return cmd_tree(tc, tlambda, tq, depths, trials, offspring, estimators, tseed, out);
    if (*sweep) return cmd_sweep(config, out);
    if (*bisect) return cmd_bisect(bn, bd, pairs, bseed, out);
    if (*moments) return cmd_moments(mc, mlambda, lmin, lmax, steps, mq, mseed, onset, out);
    if (*plot) return cmd_plot(kind, in, out, pc, title);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParam;
  }
  return 0;
}

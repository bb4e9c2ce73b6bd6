#include "sbmkit/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "sbmkit/errors.hpp"
#include "sbmkit/io.hpp"
#include "sbmkit/nb.hpp"
#include "sbmkit/posterior.hpp"
#include "sbmkit/rng.hpp"

namespace sbmkit {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& s) {
  double x = 0.0;
  const std::string t = trim(s);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ParameterError("config: " + key + ": not a number: '" + t + "'");
  }
  return x;
}

std::uint64_t parse_count(const std::string& key, const std::string& s) {
  std::uint64_t x = 0;
  const std::string t = trim(s);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ParameterError("config: " + key + ": not a nonnegative integer: '" + t + "'");
  }
  return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& s) {
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw ParameterError("config: " + key + ": range must be start:stop:step");
    const double start = parse_double(key, parts[0]);
    const double stop = parse_double(key, parts[1]);
    const double step = parse_double(key, parts[2]);
    if (!(step > 0.0) || stop < start) throw ParameterError("config: " + key + ": bad range");
    std::vector<double> out;
    // Computed as start + k*step so values do not accumulate rounding.
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) out.push_back(start + static_cast<double>(k) * step);
    return out;
  }
  std::vector<double> out;
  for (const std::string& item : split(s, ',')) {
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

const char* experiment_name(Experiment e) { return e == Experiment::planted_coloring ? "planted_coloring" : "sbm"; }

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path partial = path;
  partial += ".partial";
  {
    std::ofstream os(partial, std::ios::binary);
    if (!os) throw IoError("cannot open " + partial.string() + " for writing");
    os << content;
    os.flush();
    if (!os) throw IoError("write failed: " + partial.string());
  }
  std::error_code ec;
  std::filesystem::rename(partial, path, ec);
  if (ec) throw IoError("cannot rename " + partial.string() + ": " + ec.message());
}

struct Job {
  std::size_t point;
  std::size_t seed_index;
};

std::vector<SweepRow> run_job(const SweepConfig& cfg, const Job& job) {
  const SbmParams params = cfg.point(job.point);
  const DerivedParams d = derive_params(params);
  const std::uint64_t seed = derive_seed(derive_seed(cfg.seed, job.point), job.seed_index);
  const SbmSample sample = sample_sbm(params, seed);
  std::vector<SweepRow> rows;
  for (InitMode mode : cfg.inits) {
    InitSpec init;
    init.mode = mode;
    init.noise = cfg.noise;
    init.seed = derive_seed(seed, 0x1e1);
    if (mode == InitMode::planted) init.planted = sample.labels;
    BpOptions opts;
    opts.tol = cfg.tol;
    opts.max_sweeps = cfg.max_sweeps;
    opts.order_seed = derive_seed(seed, 0x0bd);
    const BpResult r = run_bp(sample.graph, params, init, opts);
    SweepRow row;
    row.point = job.point;
    row.experiment = cfg.experiment;
    row.q = cfg.q;
    row.n = cfg.n;
    row.c_in = params.c_in();
    row.c_out = params.c_out();
    row.c = d.c;
    row.lambda = d.lambda;
    row.seed = job.seed_index;
    row.init = mode;
    row.converged = r.converged;
    row.sweeps = r.sweeps;
    row.overlap = overlap(r.hard_labels, sample.labels, cfg.q);
    row.bethe_f = r.bethe_free_energy;
    rows.push_back(row);
  }
  return rows;
}

std::string spectrum_dump(const SweepConfig& cfg) {
  std::ostringstream os;
  os << "point,c,re,im,is_outlier\n";
  for (std::size_t p = 0; p < cfg.grid_size(); ++p) {
    const SbmParams params = cfg.point(p);
    const std::uint64_t seed = derive_seed(derive_seed(cfg.seed, p), 0);
    const SbmSample sample = sample_sbm(params, seed);
    const double c = 2.0 * static_cast<double>(sample.graph.num_edges()) / static_cast<double>(cfg.n);
    NbOperator op(sample.graph);
    SpectrumOptions o;
    o.k = std::min<std::size_t>(cfg.q + 2, 10);
    o.seed = seed;
    const Spectrum s = leading_spectrum(op, o);
    for (const Eigenpair& ep : s.leading) {
      os << p << ',' << format_number(derive_params(params).c) << ',' << format_number(ep.value.real()) << ','
         << format_number(ep.value.imag()) << ',' << (is_outlier(ep.value, c, 0.05) ? 1 : 0) << '\n';
    }
  }
  return os.str();
}

}  // namespace

std::size_t SweepConfig::grid_size() const { return experiment == Experiment::planted_coloring ? c.size() : c_in.size(); }

SbmParams SweepConfig::point(std::size_t index) const {
  if (experiment == Experiment::planted_coloring) return SbmParams::planted_coloring(q, n, c.at(index));
  return SbmParams::symmetric(q, n, c_in.at(index), c_out.at(index));
}

void SweepConfig::validate() const {
  if (q < 2) throw ParameterError("config: q must be >= 2");
  if (n == 0) throw ParameterError("config: n must be positive");
  if (seeds == 0) throw ParameterError("config: seeds must be >= 1");
  if (inits.empty()) throw ParameterError("config: no init modes");
  if (experiment == Experiment::planted_coloring) {
    if (c.empty()) throw ParameterError("config: empty c grid");
  } else {
    if (c_in.empty()) throw ParameterError("config: empty cin grid");
    if (c_in.size() != c_out.size()) throw ParameterError("config: cin and cout lists differ in length");
  }
  if (threads == 0) throw ParameterError("config: threads must be >= 1");
  for (std::size_t p = 0; p < grid_size(); ++p) (void)point(p);
}

std::optional<InitMode> parse_init_mode(const std::string& s) {
  if (s == "random") return InitMode::random;
  if (s == "uniform") return InitMode::uniform;
  if (s == "planted") return InitMode::planted;
  return std::nullopt;
}

std::string to_string(InitMode m) {
  switch (m) {
    case InitMode::random:
      return "random";
    case InitMode::uniform:
      return "uniform";
    case InitMode::planted:
      return "planted";
  }
  return "random";
}

SweepConfig parse_sweep_config(std::istream& is) {
  SweepConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "experiment") {
      if (value == "planted_coloring") {
        cfg.experiment = Experiment::planted_coloring;
      } else if (value == "sbm") {
        cfg.experiment = Experiment::sbm;
      } else {
        throw ParameterError("config: unknown experiment '" + value + "'");
      }
    } else if (key == "q") {
      cfg.q = parse_count(key, value);
    } else if (key == "n") {
      cfg.n = parse_count(key, value);
    } else if (key == "c") {
      cfg.c = parse_list(key, value);
    } else if (key == "cin") {
      cfg.c_in = parse_list(key, value);
    } else if (key == "cout") {
      cfg.c_out = parse_list(key, value);
    } else if (key == "seeds") {
      cfg.seeds = parse_count(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_count(key, value);
    } else if (key == "init") {
      cfg.inits.clear();
      for (const std::string& item : split(value, ',')) {
        const auto mode = parse_init_mode(item);
        if (!mode) throw ParameterError("config: unknown init '" + item + "'");
        cfg.inits.push_back(*mode);
      }
    } else if (key == "noise") {
      cfg.noise = parse_double(key, value);
    } else if (key == "tol") {
      cfg.tol = parse_double(key, value);
    } else if (key == "max_sweeps") {
      cfg.max_sweeps = parse_count(key, value);
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "summary_out") {
      cfg.summary_out = value;
    } else if (key == "spectrum_out") {
      cfg.spectrum_out = value;
    } else if (key == "threads") {
      cfg.threads = parse_count(key, value);
    } else {
      throw ParameterError("config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return parse_sweep_config(is);
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < cfg.grid_size(); ++p) {
    for (std::size_t s = 0; s < cfg.seeds; ++s) jobs.push_back({p, s});
  }
  std::vector<std::vector<SweepRow>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) return;
      try {
        results[k] = run_job(cfg, jobs[k]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const std::size_t threads = std::min(cfg.threads, jobs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult out;
  for (auto& rows : results) {
    for (SweepRow& r : rows) {
      out.all_converged = out.all_converged && r.converged;
      out.rows.push_back(r);
    }
  }

  const bool has_random = std::find(cfg.inits.begin(), cfg.inits.end(), InitMode::random) != cfg.inits.end();
  const bool has_planted = std::find(cfg.inits.begin(), cfg.inits.end(), InitMode::planted) != cfg.inits.end();
  if (has_random && has_planted) {
    for (std::size_t p = 0; p < cfg.grid_size(); ++p) {
      SweepSummary s;
      std::size_t nr = 0;
      std::size_t np = 0;
      for (const SweepRow& r : out.rows) {
        if (r.point != p) continue;
        s.c_in = r.c_in;
        s.c_out = r.c_out;
        s.c = r.c;
        s.lambda = r.lambda;
        if (r.init == InitMode::random) {
          s.overlap_random += r.overlap;
          s.f_random += r.bethe_f;
          ++nr;
        } else if (r.init == InitMode::planted) {
          s.overlap_planted += r.overlap;
          s.f_planted += r.bethe_f;
          ++np;
        }
      }
      s.overlap_random /= static_cast<double>(nr);
      s.f_random /= static_cast<double>(nr);
      s.overlap_planted /= static_cast<double>(np);
      s.f_planted /= static_cast<double>(np);
      s.delta_f = s.f_planted - s.f_random;
      out.summary.push_back(s);
    }
  }
  return out;
}

SweepResult run_sweep_to_files(const SweepConfig& cfg) {
  if (cfg.out.empty()) throw ParameterError("config: out path required");
  SweepResult r = run_sweep(cfg);
  std::ostringstream rows;
  write_sweep_csv(rows, r.rows);
  write_atomically(cfg.out, rows.str());
  if (!cfg.summary_out.empty()) {
    std::ostringstream s;
    write_summary_csv(s, r.summary);
    write_atomically(cfg.summary_out, s.str());
  }
  if (!cfg.spectrum_out.empty()) write_atomically(cfg.spectrum_out, spectrum_dump(cfg));
  return r;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "experiment,q,n,c_in,c_out,c,lambda,seed,init,converged,sweeps,overlap,bethe_f\n";
  for (const SweepRow& r : rows) {
    os << experiment_name(r.experiment) << ',' << r.q << ',' << r.n << ',' << format_number(r.c_in) << ','
       << format_number(r.c_out) << ',' << format_number(r.c) << ',' << format_number(r.lambda) << ',' << r.seed
       << ',' << to_string(r.init) << ',' << (r.converged ? "true" : "false") << ',' << r.sweeps << ','
       << format_number(r.overlap) << ',' << format_number(r.bethe_f) << '\n';
  }
}

void write_summary_csv(std::ostream& os, const std::vector<SweepSummary>& summary) {
  os << "c_in,c_out,c,lambda,overlap_random,overlap_planted,f_random,f_planted,delta_f\n";
  for (const SweepSummary& s : summary) {
    os << format_number(s.c_in) << ',' << format_number(s.c_out) << ',' << format_number(s.c) << ','
       << format_number(s.lambda) << ',' << format_number(s.overlap_random) << ','
       << format_number(s.overlap_planted) << ',' << format_number(s.f_random) << ','
       << format_number(s.f_planted) << ',' << format_number(s.delta_f) << '\n';
  }
}

std::optional<double> free_energy_crossing(const std::vector<SweepSummary>& summary, double zero_tol) {
  std::vector<const SweepSummary*> nonzero;
  for (const SweepSummary& s : summary) {
    if (std::abs(s.delta_f) > zero_tol) nonzero.push_back(&s);
  }
  for (std::size_t i = 0; i + 1 < nonzero.size(); ++i) {
    const SweepSummary& a = *nonzero[i];
    const SweepSummary& b = *nonzero[i + 1];
    if ((a.delta_f > 0) != (b.delta_f > 0)) {
      return a.c + (b.c - a.c) * a.delta_f / (a.delta_f - b.delta_f);
    }
  }
  return std::nullopt;
}

}  // namespace sbmkit

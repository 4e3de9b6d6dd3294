// mifsim: run MIF games, exact analyses and bound tables from the command line.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "mif/adversaries.hpp"
#include "mif/algorithms.hpp"
#include "mif/analysis.hpp"
#include "mif/engine.hpp"
#include "mif/reductions.hpp"
#include "mif/registry.hpp"

namespace {

enum Exit { kOk = 0, kInvariant = 1, kConfig = 2, kBudget = 3 };

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "text";
  unsigned threads = 1;
};

struct InstanceArgs {
  mif::Item n = 16;
  std::size_t ell = 4;
  double delta = 0.1;
  mif::Instance get() const {
    mif::Instance inst{n, ell, delta};
    inst.validate();
    return inst;
  }
};

void add_instance(CLI::App* cmd, InstanceArgs& a) {
  cmd->add_option("-n,--n", a.n, "Universe size");
  cmd->add_option("-l,--ell", a.ell, "Stream length");
  cmd->add_option("-d,--delta", a.delta, "Target error probability");
}

void add_algorithm(CLI::App* cmd, std::string& id, mif::AlgorithmOptions& o) {
  cmd->add_option("-a,--algorithm", id, "Algorithm id")->check(CLI::IsMember(mif::algorithm_ids()));
  cmd->add_option("--constant", o.constant, "Output of the constant algorithm (0 = abort)");
  cmd->add_option("--sb-parts", o.seed_block.parts, "seed_block: part count t");
  cmd->add_option("--sb-list", o.seed_block.list, "seed_block: list length k");
  cmd->add_option("--sb-blocks", o.seed_block.blocks, "seed_block: block count s");
  cmd->add_option("--rt-root", o.rt_root_width, "rt_custom: root width w_1");
  cmd->add_option("--rt-b", o.rt_b, "rt_custom: b_1 .. b_d");
  cmd->add_option("--states", o.states, "uniform_output: number of states");
  cmd->add_option("--copies", o.copies, "Majority vote over this many copies");
  cmd->add_option("--corrupt", o.corrupt, "Per-step output corruption rate");
}

// Writes to --out when given, else stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw mif::PreconditionError("cannot open output file " + path);
    }
  }
  std::ostream& get() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
  InstanceArgs inst;
  std::string algorithm = "det_bitmap";
  mif::AlgorithmOptions alg;
  std::string adversary = "echo";
  mif::AdversaryOptions adv;
  std::size_t trials = 100;
  std::string transcript;
};

int simulate(const Common& c, const SimulateArgs& s) {
  const auto inst = s.inst.get();
  const auto a = mif::make_algorithm(s.algorithm, inst, s.alg);
  const auto adv = mif::make_adversary(s.adversary, inst, *a, s.adv);
  const auto est = mif::estimate_error(*a, *adv, inst, s.trials, c.seed, c.threads);
  if (!s.transcript.empty()) {
    std::ofstream t(s.transcript);
    mif::write_transcript(t, mif::run_game(*a, *adv, inst, mif::derive_seed(c.seed, {0})).transcript);
  }
  Sink sink(c.out);
  auto& out = sink.get();
  if (c.format == "csv") {
    out << "row,verdict,step,mistake_rate,abort_rate,failure_rate,failure_half_width,declared_bits,max_observed_bits\n";
    for (std::size_t i = 0; i < est.verdicts.size(); ++i) {
      const auto& v = est.verdicts[i];
      out << i << ',' << mif::to_string(v) << ',' << v.step << ",,,,,,\n";
    }
    out << "summary,,," << fmt(est.mistake_rate) << ',' << fmt(est.abort_rate) << ',' << fmt(est.failure_rate) << ','
        << fmt(est.failure_half_width) << ',' << est.space.declared_bits << ',' << est.space.max_observed_bits << '\n';
  } else {
    out << a->name() << " vs " << adv->kind() << " on MIF(" << inst.n << ',' << inst.ell << "), " << est.trials
        << " trials\n"
        << "mistake_rate " << fmt(est.mistake_rate) << " +- " << fmt(est.mistake_half_width) << '\n'
        << "abort_rate " << fmt(est.abort_rate) << " +- " << fmt(est.abort_half_width) << '\n'
        << "failure_rate " << fmt(est.failure_rate) << " +- " << fmt(est.failure_half_width) << '\n'
        << "bits declared " << est.space.declared_bits << " observed " << est.space.max_observed_bits << '\n';
  }
  return kOk;
}

// ---- minimax ------------------------------------------------------------------

struct MinimaxArgs {
  InstanceArgs inst{4, 2, 0};
  std::string algorithm = "det_bitmap";
  mif::AlgorithmOptions alg;
  std::size_t budget = 5'000'000;
};

int minimax(const Common& c, const MinimaxArgs& m) {
  const auto inst = m.inst.get();
  const auto a = mif::make_algorithm(m.algorithm, inst, m.alg);
  const auto r = mif::minimax_worst_error(*a, inst, m.budget);
  Sink sink(c.out);
  auto& out = sink.get();
  if (c.format == "csv") {
    out << "algorithm,n,ell,max_mistake,induced_abort,max_abort,max_failure,depth,nodes\n"
        << a->name() << ',' << inst.n << ',' << inst.ell << ',' << fmt(r.max_mistake) << ',' << fmt(r.induced_abort)
        << ',' << fmt(r.max_abort) << ',' << fmt(r.max_failure) << ',' << r.depth << ',' << r.nodes << '\n';
  } else {
    out << "(" << fmt(r.max_mistake) << ", " << fmt(r.max_abort) << ")\n"
        << "induced_abort " << fmt(r.induced_abort) << "\nmax_failure " << fmt(r.max_failure) << "\ndepth "
        << r.depth << "\nnodes " << r.nodes << '\n';
  }
  return kOk;
}

// ---- bounds -------------------------------------------------------------------

struct BoundsArgs {
  mif::Item n = 1u << 20;
  double delta = -1;  // default 1/n^2
  std::vector<std::size_t> ells;
};

int bounds(const Common& c, const BoundsArgs& b) {
  const double delta = b.delta >= 0 ? b.delta : 1.0 / (static_cast<double>(b.n) * static_cast<double>(b.n));
  std::vector<std::size_t> grid = b.ells;
  if (grid.empty())
    for (std::size_t l = 2; l < b.n; l *= 2) grid.push_back(l);
  Sink sink(c.out);
  auto& out = sink.get();
  if (c.format == "csv") {
    mif::emit_bounds_csv(out, b.n, delta, grid);
    return kOk;
  }
  for (const auto& r : mif::bound_rows(b.n, delta, grid)) {
    out << r.model << ' ' << r.direction << " ell=" << r.ell << " bits=" << fmt(r.bits);
    if (r.witness_k) out << " k=" << *r.witness_k;
    if (r.model == "tape" && r.direction == "lower" && r.ell * r.ell == b.n)
      out << " exponent=" << fmt(mif::rt_lb_exponent(b.n, r.ell, *r.witness_k)) << " (ell = sqrt(n))";
    out << '\n';
  }
  return kOk;
}

// ---- params -------------------------------------------------------------------

int params(const Common& c, const InstanceArgs& ia) {
  const auto p = mif::rt_params(ia.get());
  Sink sink(c.out);
  auto& out = sink.get();
  out << p.to_text();
  // Invariant checks, in exact integer arithmetic where possible.
  bool ok = p.leaf_count() <= p.n;
  long double tail = 1;
  for (std::size_t i = 1; i < p.d; ++i) tail *= static_cast<long double>(p.b[i]);
  const long double ell = static_cast<long double>(p.ell), alpha = p.alpha;
  ok = ok && ell / alpha <= tail * (1 + 1e-12L) && tail <= 4 * ell / alpha * (1 + 1e-12L);
  out << "invariant_checks=" << (ok ? "pass" : "FAIL") << '\n';
  return ok ? kOk : kInvariant;
}

// ---- avoid --------------------------------------------------------------------

struct AvoidArgs {
  mif::Item m = 8;
  std::size_t a = 2, b = 2;
  std::string algorithm = "det_bitmap";
  mif::AlgorithmOptions alg;
  std::size_t trials = 0;  // 0: exhaustive
};

int avoid(const Common& c, const AvoidArgs& v) {
  const mif::AvoidInstance ai{v.m, v.a, v.b, 0};
  const auto automaton = mif::make_algorithm(v.algorithm, {v.m, v.a + v.b, 0}, v.alg);
  const auto protocol = mif::avoid_from_mif(automaton, ai);
  const auto s = v.trials ? mif::avoid_sampled(protocol, v.trials, c.seed) : mif::avoid_exhaustive(protocol, c.seed);
  const double bound = s.failure_rate < 1 ? mif::avoid_lb({v.m, v.a, v.b, s.failure_rate}) : 0;
  const bool ok = static_cast<double>(s.message_bits) >= bound;
  Sink sink(c.out);
  auto& out = sink.get();
  if (c.format == "csv") {
    mif::write_avoid_csv(out, s);
  } else {
    out << "runs " << s.runs << "\nfailures " << s.failures << "\nmessage_bits " << s.message_bits
        << "\nmax_observed_bits " << s.max_observed_bits << "\navoid_lb " << fmt(bound) << '\n';
  }
  if (!ok) std::cerr << "message shorter than the AVOID lower bound\n";
  return ok ? kOk : kInvariant;
}

// ---- fco ----------------------------------------------------------------------

struct FcoArgs {
  mif::Item n = 64;
  std::vector<std::size_t> t{8, 8};
  std::size_t s_size = 0;  // 0: |S| = n
  std::size_t k = 1;
  std::vector<mif::Item> prefix;  // empty: random
  double eps = 0;
};

int fco(const Common& c, const FcoArgs& f) {
  std::vector<mif::Item> s(f.s_size ? f.s_size : f.n);
  std::iota(s.begin(), s.end(), mif::Item{1});
  const auto prm = mif::FcoParams::custom(f.n, f.t, s);
  std::vector<mif::Item> x = f.prefix;
  if (x.empty()) {
    mif::Rng rng(mif::derive_seed(c.seed, {0}));
    std::uniform_int_distribution<mif::Item> pick(1, f.n);
    for (std::size_t i = 0; i < prm.prefix_length(f.k); ++i) x.push_back(pick(rng));
  }
  auto B = mif::canonical_min_missing(f.n, prm.ell);
  if (f.eps > 0) B = mif::noisy(B, f.eps, mif::derive_seed(c.seed, {1}), f.n);
  const auto r = mif::fco(B, mif::ThresholdMatrix(mif::derive_seed(c.seed, {2})), x, f.k, prm);
  Sink sink(c.out);
  auto& out = sink.get();
  if (c.format == "csv") {
    mif::write_fco_csv(out, r);
  } else {
    out << prm.to_text() << "set=";
    for (std::size_t i = 0; i < r.set.size(); ++i) out << (i ? "," : "") << r.set[i];
    out << "\nfailed=" << r.failed << "\nany_failed=" << r.any_failed << "\ncalls=" << r.calls << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Missing item finding: games, exact analyses and bounds"};
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "Base seed");
  app.add_option("--out", common.out, "Output file (default stdout)");
  app.add_option("--format", common.format, "Output format")->check(CLI::IsMember({"text", "csv"}));
  app.add_option("--threads", common.threads, "Worker threads for trials")->check(CLI::PositiveNumber);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Estimate error rates of an algorithm against an adversary");
  add_instance(sim_cmd, sim.inst);
  add_algorithm(sim_cmd, sim.algorithm, sim.alg);
  sim_cmd->add_option("-A,--adversary", sim.adversary, "Adversary id")->check(CLI::IsMember(mif::adversary_ids()));
  sim_cmd->add_option("--p-echo", sim.adv.p_echo, "mixed: echo probability");
  sim_cmd->add_option("--stream", sim.adv.stream, "replay: items to feed");
  sim_cmd->add_option("--phase-length", sim.adv.learner.phase_length, "learning: t");
  sim_cmd->add_option("--max-phases", sim.adv.learner.max_phases, "learning: h_max");
  sim_cmd->add_option("--trials", sim.trials, "Number of games")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--transcript", sim.transcript, "Also write the first game's transcript here");

  MinimaxArgs mm;
  auto* mm_cmd = app.add_subcommand("minimax", "Exact worst-case mistake and abort probabilities");
  add_instance(mm_cmd, mm.inst);
  add_algorithm(mm_cmd, mm.algorithm, mm.alg);
  mm_cmd->add_option("--budget", mm.budget, "Search node budget");

  BoundsArgs bd;
  auto* bd_cmd = app.add_subcommand("bounds", "Space bounds for every model over an ell grid");
  bd_cmd->add_option("-n,--n", bd.n, "Universe size");
  bd_cmd->add_option("-d,--delta", bd.delta, "Error level (default 1/n^2)");
  bd_cmd->add_option("--ell", bd.ells, "Stream lengths (default powers of two below n)");

  InstanceArgs pa{4096, 64, 0.1};
  auto* pa_cmd = app.add_subcommand("params", "Print the recursive random-tape parameters");
  add_instance(pa_cmd, pa);

  AvoidArgs av;
  auto* av_cmd = app.add_subcommand("avoid", "Run the AVOID protocol built from an MIF algorithm");
  av_cmd->add_option("-m,--m", av.m, "Universe size");
  av_cmd->add_option("--size-a", av.a, "Alice's set size");
  av_cmd->add_option("--size-b", av.b, "Bob's set size");
  add_algorithm(av_cmd, av.algorithm, av.alg);
  av_cmd->add_option("--trials", av.trials, "Random sets instead of all sets");

  FcoArgs fc;
  auto* fc_cmd = app.add_subcommand("fco", "Trace FindCommonOutputs on the min-missing function");
  fc_cmd->add_option("-n,--n", fc.n, "Universe size");
  fc_cmd->add_option("--t", fc.t, "Interval lengths t_1 .. t_d");
  fc_cmd->add_option("--s-size", fc.s_size, "|S| (default n)");
  fc_cmd->add_option("-k,--k", fc.k, "Level");
  fc_cmd->add_option("--prefix", fc.prefix, "Prefix x (default random)");
  fc_cmd->add_option("--eps", fc.eps, "Per-call corruption of the output function");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*sim_cmd) return simulate(common, sim);
    if (*mm_cmd) return minimax(common, mm);
    if (*bd_cmd) return bounds(common, bd);
    if (*pa_cmd) return params(common, pa);
    if (*av_cmd) return avoid(common, av);
    if (*fc_cmd) return fco(common, fc);
  } catch (const mif::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kBudget;
  } catch (const mif::PreconditionError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const mif::ContractViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kInvariant;
  }
  return kConfig;
}

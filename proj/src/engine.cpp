#include "mif/engine.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_set>

namespace mif {

std::optional<Output> Transcript::last_output() const {
  if (!rounds.empty()) return rounds.back().output;
  return initial_output;
}

std::vector<std::size_t> check_transcript(const Transcript& t) {
  std::vector<std::size_t> bad;
  std::unordered_set<Item> seen;
  for (std::size_t i = 0; i < t.rounds.size(); ++i) {
    seen.insert(t.rounds[i].input);
    const Output o = t.rounds[i].output;
    if (!o.is_abort() && seen.count(o.item())) bad.push_back(i + 1);
  }
  return bad;
}

void write_transcript(std::ostream& out, const Transcript& t) {
  out << "step,input,output\n";
  if (t.initial_output) out << "0,," << to_string(*t.initial_output) << '\n';
  for (std::size_t i = 0; i < t.rounds.size(); ++i)
    out << i + 1 << ',' << t.rounds[i].input << ',' << to_string(t.rounds[i].output) << '\n';
}

namespace {
Output parse_output(const std::string& s) {
  if (s == "ABORT") return Output::abort();
  return Output::of(std::stoull(s));
}
}  // namespace

Transcript read_transcript(std::istream& in) {
  Transcript t;
  std::string line;
  if (!std::getline(in, line) || line != "step,input,output")
    throw PreconditionError("transcript: missing header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string step, input, output;
    std::getline(row, step, ',');
    std::getline(row, input, ',');
    std::getline(row, output, ',');
    if (step == "0") {
      t.initial_output = parse_output(output);
      continue;
    }
    if (std::stoull(step) != t.rounds.size() + 1) throw PreconditionError("transcript: steps out of order");
    t.rounds.push_back({std::stoull(input), parse_output(output)});
  }
  return t;
}

std::string to_string(const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::Ok: return "ok";
    case Verdict::Kind::Mistake: return "mistake";
    case Verdict::Kind::Abort: return "abort";
  }
  return "?";
}

GameSession::GameSession(const Automaton& a, std::uint64_t seed)
    : automaton_(&a), init_rng_(derive_seed(seed, {1})), tape_rng_(derive_seed(seed, {2})) {
  switch (a.mode()) {
    case RandomnessMode::Deterministic:
      init_r_ = std::make_unique<NoRandomness>("deterministic init");
      step_r_ = std::make_unique<NoRandomness>("deterministic transition");
      break;
    case RandomnessMode::RandomSeed:
      init_r_ = std::make_unique<StreamRandomness>(init_rng_);
      step_r_ = std::make_unique<NoRandomness>("random-seed transition");
      break;
    case RandomnessMode::RandomTape:
      init_r_ = std::make_unique<StreamRandomness>(init_rng_);
      step_r_ = std::make_unique<StreamRandomness>(tape_rng_);
      break;
    case RandomnessMode::RandomOracle: {
      Oracle oracle(derive_seed(seed, {3}));
      init_r_ = std::make_unique<OracleRandomness>(oracle);
      step_r_ = std::make_unique<OracleRandomness>(oracle);
      out_r_ = std::make_unique<OracleRandomness>(oracle);
      break;
    }
  }
  if (!out_r_) out_r_ = std::make_unique<NoRandomness>("output map");
  state_ = a.initial(*init_r_);
  measure();
  current_ = compute_output();
}

Output GameSession::feed(Item input) {
  if (aborted()) throw ContractViolation("input fed after abort");
  automaton_->transition(*state_, input, *step_r_);
  measure();
  current_ = compute_output();
  return current_;
}

std::size_t GameSession::state_width() const { return encoded_width(*state_); }

void GameSession::measure() {
  const std::size_t w = state_width();
  if (w > automaton_->declared_bits()) {
    throw SpaceViolation(automaton_->name() + ": state uses " + std::to_string(w) +
                         " bits, declared " + std::to_string(automaton_->declared_bits()));
  }
  max_bits_ = std::max(max_bits_, w);
}

Output GameSession::compute_output() {
  Output o = automaton_->output(*state_, *out_r_);
  if (!o.is_abort() && (o.item() < 1 || o.item() > automaton_->universe()))
    throw ContractViolation(automaton_->name() + ": output outside [n]");
  return o;
}

GameRun run_game(const Automaton& a, Adversary& adv, const Instance& inst, std::uint64_t seed) {
  inst.validate();
  if (a.universe() != inst.n) throw PreconditionError("automaton universe differs from instance n");
  GameSession session(a, seed);
  Rng adv_rng(derive_seed(seed, {4}));

  GameRun run;
  run.transcript.initial_output = session.current_output();
  run.transcript.rounds.reserve(inst.ell);
  if (session.aborted()) {
    run.result = {Verdict::abort(0), session.space()};
    return run;
  }
  std::unordered_set<Item> seen;
  seen.reserve(inst.ell * 2);
  Verdict verdict;
  for (std::size_t step = 1; step <= inst.ell; ++step) {
    const Item e = adv.next_input(run.transcript, adv_rng);
    if (e < 1 || e > inst.n) throw ContractViolation(adv.kind() + ": input outside [n]");
    seen.insert(e);
    const Output o = session.feed(e);
    run.transcript.rounds.push_back({e, o});
    if (o.is_abort()) {
      if (!verdict.failed()) verdict = Verdict::abort(step);
      break;
    }
    if (!verdict.failed() && seen.count(o.item())) verdict = Verdict::mistake(step);
  }
  run.result = {verdict, session.space()};
  return run;
}

GameRun run_game(const Automaton& a, const Adversary& adv, const Instance& inst,
                 std::uint64_t seed) {
  auto fresh = adv.clone();
  return run_game(a, *fresh, inst, seed);
}

double wilson_half_width(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return 1.0;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  return z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
}

ErrorEstimate estimate_error(const Automaton& a, const Adversary& adv, const Instance& inst,
                             std::size_t trials, std::uint64_t seed, unsigned threads) {
  if (trials < 1) throw PreconditionError("estimate_error: trials must be positive");
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(trials)));

  std::vector<Verdict> verdicts(trials);
  std::vector<std::size_t> max_bits(threads, 0);
  std::vector<std::exception_ptr> errors(threads);
  auto worker = [&](unsigned id) {
    try {
      for (std::size_t i = id; i < trials; i += threads) {
        GameRun run = run_game(a, adv, inst, derive_seed(seed, {i}));
        verdicts[i] = run.result.verdict;
        max_bits[id] = std::max(max_bits[id], run.result.space.max_observed_bits);
      }
    } catch (...) {
      errors[id] = std::current_exception();
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned id = 0; id < threads; ++id) pool.emplace_back(worker, id);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  ErrorEstimate est;
  est.trials = trials;
  for (const auto& v : verdicts) {
    if (v.kind == Verdict::Kind::Mistake) ++est.mistakes;
    if (v.kind == Verdict::Kind::Abort) ++est.aborts;
  }
  const double n = static_cast<double>(trials);
  est.mistake_rate = est.mistakes / n;
  est.abort_rate = est.aborts / n;
  est.failure_rate = (est.mistakes + est.aborts) / n;
  est.mistake_half_width = wilson_half_width(est.mistakes, trials);
  est.abort_half_width = wilson_half_width(est.aborts, trials);
  est.failure_half_width = wilson_half_width(est.mistakes + est.aborts, trials);
  est.space = {a.declared_bits(), *std::max_element(max_bits.begin(), max_bits.end())};
  est.verdicts = std::move(verdicts);
  return est;
}

}  // namespace mif

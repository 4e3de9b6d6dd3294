#include <algorithm>
#include <set>
#include <sstream>

#include "belief_game.hpp"

namespace mif {

using detail::History;
using detail::Objective;
using detail::Value;

std::string to_string(LearnerStatus s) {
  switch (s) {
    case LearnerStatus::Prefix: return "prefix";
    case LearnerStatus::Running: return "running";
    case LearnerStatus::Done: return "done";
    case LearnerStatus::FailedEmptyQ: return "failed-empty-q";
    case LearnerStatus::FailedPhases: return "failed-phases";
  }
  return "?";
}

std::shared_ptr<const LearnerPlan> plan_learner(FiniteModel m, const Instance& inst, const LearnerConfig& cfg) {
  inst.validate();
  m.validate();
  if (m.n != inst.n) throw PreconditionError("learner: model universe differs from n");
  auto p = std::make_shared<LearnerPlan>();
  p->inst = inst;
  p->q = (inst.ell + 1) / 2;
  p->z = cfg.z ? cfg.z : std::max<std::size_t>(1, bits_for(m.size()));
  p->w = 2 * ((32 * p->z * inst.n) / inst.ell);
  p->h_max = cfg.max_phases.value_or(32 * p->z);
  if (cfg.phase_length) {
    p->t = *cfg.phase_length;
  } else {
    p->t = p->h_max ? inst.ell / (2 * p->h_max) : 0;
    if (p->t == 0) {
      p->t = 1;
      if (!cfg.max_phases) p->h_max = inst.ell - p->q;
    }
  }
  if (p->t < 1) throw PreconditionError("learner: phase length must be positive");
  if (p->q + p->t * p->h_max > inst.ell) throw PreconditionError("learner: prefix plus phases exceed ell");
  p->safe = compute_safe_sets(m, p->q, cfg.safe_sets);
  for (StateId s = 0; s < m.size(); ++s) {
    const auto size = static_cast<std::size_t>(std::count(p->safe[s].begin(), p->safe[s].end(), true));
    if (2 * size <= p->w) p->q0.push_back(s);
  }
  p->search_budget = cfg.search_budget;
  p->model = std::move(m);
  return p;
}

LearningAdversary::LearningAdversary(std::shared_ptr<const LearnerPlan> plan) : plan_(std::move(plan)) {}

std::unique_ptr<Adversary> LearningAdversary::clone() const { return std::make_unique<LearningAdversary>(plan_); }

Item LearningAdversary::next_input(const Transcript& seen, Rng& rng) {
  const auto& p = *plan_;
  if (status_ == LearnerStatus::Prefix) {
    if (prefix_.empty()) {
      prefix_ = sample_without_repetition(
          p.inst.n, p.q, [&](std::uint64_t k) { return std::uniform_int_distribution<std::uint64_t>(0, k - 1)(rng); });
      std::sort(prefix_.begin(), prefix_.end());
    }
    if (seen.size() < prefix_.size()) {
      ++strategic_;
      return last_ = prefix_[seen.size()];
    }
    status_ = LearnerStatus::Running;
    q_ = p.q0;
    open_phase(seen);
  }
  if (status_ == LearnerStatus::Running && in_phase_ && seen.size() - phase_start_ >= p.t) {
    close_phase(seen);
    if (status_ == LearnerStatus::Running) open_phase(seen);
  }
  if (in_phase_ && seen.size() - phase_start_ < p.t) {
    std::vector<Output> since;
    for (std::size_t i = phase_start_; i < seen.size(); ++i) since.push_back(seen.rounds[i].output);
    if (const Item x = phase_.lookup(since)) {
      ++strategic_;
      return last_ = x;
    }
  }
  return last_;
}

void LearningAdversary::finish(const Transcript& seen) {
  if (status_ == LearnerStatus::Running && in_phase_ && phase_is_split_ &&
      seen.size() - phase_start_ >= plan_->t)
    close_phase(seen);
}

void LearningAdversary::close_phase(const Transcript& seen) {
  in_phase_ = false;
  if (!phase_is_split_) return;
  std::vector<Output> y;
  for (std::size_t i = phase_start_; i < phase_start_ + plan_->t && i < seen.size(); ++i)
    y.push_back(seen.rounds[i].output);
  const auto& safe = plan_->safe;
  std::vector<StateId> kept;
  for (StateId s : q_)
    if (std::all_of(y.begin(), y.end(), [&](Output o) { return !o.is_abort() && safe[s][o.item()]; }))
      kept.push_back(s);
  auto& rec = log_.back();
  rec.divisive = divisive(y, q_, safe);
  rec.q_after = kept.size();
  q_ = std::move(kept);
  if (q_.empty()) status_ = LearnerStatus::FailedEmptyQ;
}

namespace {

// Xi: maximise the first mistake of B, the conditioned automaton whose
// outputs outside W' count as aborts and whose inputs are the phase inputs.
// Ties go to the strategy making A fail more often.
Objective extraction_objective(const std::vector<Item>& alphabet, std::size_t t, std::set<Item> prior) {
  Objective obj;
  obj.alphabet = alphabet;
  obj.horizon = t;
  obj.score = [alphabet, prior = std::move(prior)](const History& h) -> std::pair<Value, bool> {
    bool b_over = false, a_over = false;
    Value gained;
    for (std::size_t r = 0; r < h.outputs.size(); ++r) {
      const Output o = h.outputs[r];
      const bool last = r + 1 == h.outputs.size();
      const auto begin = h.inputs.begin(), end = h.inputs.begin() + static_cast<std::ptrdiff_t>(r + 1);
      if (!b_over) {
        if (o.is_abort() || !std::binary_search(alphabet.begin(), alphabet.end(), o.item())) {
          b_over = true;
        } else if (std::find(begin, end, o.item()) != end) {
          b_over = true;
          if (last) gained.primary = 1;
        }
      }
      if (!a_over && (o.is_abort() || prior.count(o.item()) || std::find(begin, end, o.item()) != end)) {
        a_over = true;
        if (last) gained.secondary = 1;
      }
    }
    return {gained, h.outputs.back().is_abort() || (a_over && b_over)};
  };
  return obj;
}

}  // namespace

void LearningAdversary::open_phase(const Transcript& seen) {
  const auto& p = *plan_;
  if (h_ >= p.h_max) {
    status_ = LearnerStatus::FailedPhases;
    return;
  }
  ++h_;
  phase_start_ = seen.size();
  in_phase_ = true;
  const Belief posterior = posterior_update(p.model, seen);

  if (auto split = find_splitting(p.model, posterior, q_, p.safe, p.t, p.search_budget)) {
    phase_ = split->policy;
    phase_is_split_ = true;
    log_.push_back({h_, "split", q_.size(), q_.size(), false, 0, split->probability, split->mode});
    return;
  }

  phase_is_split_ = false;
  std::vector<Item> w;
  for (Item i = 1; i <= p.inst.n; ++i) {
    const auto votes = std::count_if(q_.begin(), q_.end(), [&](StateId s) { return p.safe[s][i]; });
    if (2 * static_cast<std::size_t>(votes) >= q_.size()) w.push_back(i);
  }
  extracted_.push_back(w);
  std::vector<Item> padded = w;
  for (Item i = 1; i <= p.inst.n && padded.size() < p.w; ++i)
    if (!std::binary_search(w.begin(), w.end(), i)) padded.push_back(i);
  std::sort(padded.begin(), padded.end());

  std::set<Item> prior;
  for (const auto& r : seen.rounds) prior.insert(r.input);
  const Objective obj = extraction_objective(padded, p.t, std::move(prior));
  PhaseRecord rec{h_, "extract", q_.size(), q_.size(), false, w.size(), 0, SearchMode::Exact};
  if (padded.empty()) {
    phase_ = {};
  } else {
    detail::BeliefGame game(p.model, obj, p.search_budget);
    std::shared_ptr<const PolicyNode> root;
    try {
      rec.probability = game.solve(posterior, root).primary / detail::mass(posterior);
      phase_ = DecisionTree(root);
    } catch (const BudgetExceeded&) {
      // Fall back to repeating the smallest element of W'.
      std::shared_ptr<const PolicyNode> next;
      for (std::size_t i = 0; i < p.t; ++i) {
        auto node = std::make_shared<PolicyNode>();
        node->input = padded.front();
        node->otherwise = next;
        next = node;
      }
      phase_ = DecisionTree(next);
      rec.mode = SearchMode::NonAdaptive;
    }
  }
  log_.push_back(rec);
  status_ = LearnerStatus::Done;
}

std::string LearningAdversary::phase_log_csv() const {
  std::ostringstream out;
  out << "h,kind,q_before,q_after,divisive,w_size,probability,mode\n";
  for (const auto& r : log_)
    out << r.h << ',' << r.kind << ',' << r.q_before << ',' << r.q_after << ',' << (r.divisive ? 1 : 0) << ','
        << r.w_size << ',' << r.probability << ',' << to_string(r.mode) << '\n';
  return out.str();
}

std::unique_ptr<LearningAdversary> learning_adversary(const Automaton& a, const Instance& inst,
                                                      const LearnerConfig& cfg) {
  return std::make_unique<LearningAdversary>(plan_learner(tabulate(a), inst, cfg));
}

}  // namespace mif

#include <unordered_set>

#include "mif/adversaries.hpp"

namespace mif {

namespace {

Item echo_of(const Transcript& t) {
  auto last = t.last_output();
  return last && !last->is_abort() ? last->item() : 1;
}

class Echo final : public Adversary {
 public:
  std::string kind() const override { return "echo"; }
  Item next_input(const Transcript& seen, Rng&) override { return echo_of(seen); }
  std::unique_ptr<Adversary> clone() const override { return std::make_unique<Echo>(); }
};

// Shared by the random and mixed strategies: remembers prior inputs.
class Uniform {
 public:
  explicit Uniform(Item n) : n_(n) {}

  void sync(const Transcript& t) {
    if (t.size() < consumed_) {  // a new game on a reused object
      seen_.clear();
      consumed_ = 0;
    }
    while (consumed_ < t.size()) seen_.insert(t.rounds[consumed_++].input);
  }

  Item draw(const Transcript& t, Rng& rng) {
    sync(t);
    Item avoid = echo_of(t);
    if (!t.last_output() || t.last_output()->is_abort()) avoid = 0;
    const std::size_t excluded = seen_.size() + (avoid && !seen_.count(avoid) ? 1 : 0);
    auto any = [&] { return std::uniform_int_distribution<Item>(1, n_)(rng); };
    if (excluded >= n_) return any();
    auto allowed = [&](Item x) { return x != avoid && !seen_.count(x); };
    if (2 * excluded <= n_) {
      for (;;) {
        const Item x = any();
        if (allowed(x)) return x;
      }
    }
    std::vector<Item> pool;
    for (Item x = 1; x <= n_; ++x)
      if (allowed(x)) pool.push_back(x);
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  }

 private:
  Item n_;
  std::unordered_set<Item> seen_;
  std::size_t consumed_ = 0;
};

class RandomPick final : public Adversary {
 public:
  explicit RandomPick(Item n) : n_(n), pick_(n) {}
  std::string kind() const override { return "random"; }
  Item next_input(const Transcript& seen, Rng& rng) override { return pick_.draw(seen, rng); }
  std::unique_ptr<Adversary> clone() const override { return std::make_unique<RandomPick>(n_); }

 private:
  Item n_;
  Uniform pick_;
};

class Mixed final : public Adversary {
 public:
  Mixed(Item n, double p) : n_(n), p_(p), pick_(n) {}
  std::string kind() const override { return "mixed"; }
  Item next_input(const Transcript& seen, Rng& rng) override {
    bool echo = p_ >= 1;
    if (p_ > 0 && p_ < 1) echo = std::bernoulli_distribution(p_)(rng);
    if (echo) {
      pick_.sync(seen);
      return echo_of(seen);
    }
    return pick_.draw(seen, rng);
  }
  std::unique_ptr<Adversary> clone() const override { return std::make_unique<Mixed>(n_, p_); }

 private:
  Item n_;
  double p_;
  Uniform pick_;
};

class Replay final : public Adversary {
 public:
  explicit Replay(std::vector<Item> s) : stream_(std::move(s)) {}
  std::string kind() const override { return "replay"; }
  Item next_input(const Transcript& seen, Rng&) override {
    if (stream_.empty()) return 1;
    return stream_[std::min(seen.size(), stream_.size() - 1)];
  }
  std::unique_ptr<Adversary> clone() const override { return std::make_unique<Replay>(stream_); }

 private:
  std::vector<Item> stream_;
};

}  // namespace

std::unique_ptr<Adversary> echo_adversary() { return std::make_unique<Echo>(); }

std::unique_ptr<Adversary> random_adversary(Item n) {
  if (n < 1) throw PreconditionError("random_adversary: n must be positive");
  return std::make_unique<RandomPick>(n);
}

std::unique_ptr<Adversary> mixed_adversary(Item n, double p_echo) {
  if (!(p_echo >= 0 && p_echo <= 1)) throw PreconditionError("mixed_adversary: p_echo must lie in [0,1]");
  return std::make_unique<Mixed>(n, p_echo);
}

std::unique_ptr<Adversary> replay_adversary(std::vector<Item> stream) {
  return std::make_unique<Replay>(std::move(stream));
}

}  // namespace mif

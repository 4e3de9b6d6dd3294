#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "mif/finite_model.hpp"

namespace mif::testing {

struct Outcome {
  double mistake = 0, abort = 0;
};

// Every deterministic adversary is a table from output histories (initial
// output included) to inputs; this walks all tables.
class StrategyEnumerator {
 public:
  StrategyEnumerator(const FiniteModel& m, std::size_t ell) : m_(m), ell_(ell) {
    std::set<Output> outs;
    for (Output o : m.outputs)
      if (!o.is_abort()) outs.insert(o);
    outputs_.assign(outs.begin(), outs.end());
    std::vector<std::vector<Output>> layer{{}};
    for (std::size_t len = 1; len <= ell; ++len) {
      std::vector<std::vector<Output>> grown;
      for (const auto& h : layer)
        for (Output o : outputs_) {
          auto g = h;
          g.push_back(o);
          index_[g] = index_.size();
          grown.push_back(std::move(g));
        }
      layer = std::move(grown);
    }
  }

  std::vector<Outcome> all() const {
    std::vector<Outcome> res;
    std::vector<Item> table(index_.size(), 1);
    for (;;) {
      res.push_back(play(table));
      std::size_t i = 0;
      while (i < table.size() && table[i] == m_.n) table[i++] = 1;
      if (i == table.size()) break;
      ++table[i];
    }
    return res;
  }

 private:
  Outcome play(const std::vector<Item>& table) const {
    Outcome r;
    std::map<Output, std::vector<double>> split;
    for (StateId s = 0; s < m_.size(); ++s)
      if (m_.init[s] > 0) {
        auto& v = split[m_.outputs[s]];
        v.resize(m_.size(), 0);
        v[s] += m_.init[s];
      }
    for (auto& [o, mass] : split) {
      const double p = std::accumulate(mass.begin(), mass.end(), 0.0);
      if (o.is_abort())
        r.abort += p;
      else
        walk(table, mass, {o}, {}, r);
    }
    return r;
  }

  void walk(const std::vector<Item>& table, const std::vector<double>& mass, const std::vector<Output>& hist,
            std::vector<Item> inputs, Outcome& r) const {
    const Item x = table[index_.at(hist)];
    inputs.push_back(x);
    std::map<Output, std::vector<double>> split;
    for (StateId s = 0; s < m_.size(); ++s) {
      if (mass[s] == 0) continue;
      for (const auto& tr : m_.next(s, x)) {
        auto& v = split[m_.outputs[tr.next]];
        v.resize(m_.size(), 0);
        v[tr.next] += mass[s] * tr.prob;
      }
    }
    for (auto& [o, next] : split) {
      const double p = std::accumulate(next.begin(), next.end(), 0.0);
      if (o.is_abort()) {
        r.abort += p;
      } else if (std::find(inputs.begin(), inputs.end(), o.item()) != inputs.end()) {
        r.mistake += p;
      } else if (inputs.size() < ell_) {
        auto h = hist;
        h.push_back(o);
        walk(table, next, h, inputs, r);
      }
    }
  }

  const FiniteModel& m_;
  std::size_t ell_;
  std::vector<Output> outputs_;
  std::map<std::vector<Output>, std::size_t> index_;
};

}  // namespace mif::testing

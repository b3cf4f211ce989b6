// Copyright 2026 The compoly Authors
// SPDX-License-Identifier: Apache-2.0

#include "compoly/polyeval.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace compoly {

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 4;

int ceil_log2(long n) {
  int k = 0;
  while ((1L << k) < n) ++k;
  return k;
}

int floor_pow2_below(int j) {
  // Largest power of two strictly below j (j >= 2).
  int a = 1;
  while (a * 2 < j) a *= 2;
  return a;
}

struct Planner {
  bool odd = false;
  int k = 2;
  std::vector<int> giants;
  std::vector<int> giant_depth;
  std::map<std::pair<int, int>, std::pair<int, int>> memo;  // -> (cost, split)

  int leaf_limit() const { return k - 1; }

  std::pair<int, int> cost(int deg, int budget) {
    auto key = std::make_pair(deg, budget);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::pair<int, int> best{kInf, -1};
    if (deg <= leaf_limit()) {
      int depth = deg >= 1 ? ceil_log2(deg) : 0;
      if (depth <= budget) best = {0, 0};
    } else {
      for (size_t g = 0; g < giants.size(); ++g) {
        const int G = giants[g];
        if (G > deg) break;
        const int qd = deg - G;
        int c;
        if (qd == 0) {
          if (giant_depth[g] > budget) continue;
          c = cost(G - 1, budget).first;
        } else {
          if (giant_depth[g] + 1 > budget) continue;
          int cq = cost(qd, budget - 1).first;
          int cr = cost(G - 1, budget).first;
          c = cq >= kInf || cr >= kInf ? kInf : cq + cr + 1;
        }
        if (c < best.first) best = {c, G};
      }
    }
    memo.emplace(key, best);
    return best;
  }
};

Planner make_planner(bool odd, int k, int J) {
  Planner p;
  p.odd = odd;
  p.k = k;
  const int base_depth = ceil_log2(k);
  for (int j = 0; j <= J; ++j) {
    p.giants.push_back(k << j);
    p.giant_depth.push_back(base_depth + j);
  }
  return p;
}

int odd_baby_cost(int l) { return l + (1 << (l - 1)) - 1; }

template <class T>
struct Traced {
  T v;
  int depth = 0;
  bool constant = false;
};

template <class T>
class Executor {
 public:
  Executor(const std::vector<T>& c, const T& x, const EvalPlan& plan)
      : c_(c), plan_(plan) {
    const int k = plan.baby_steps;
    pw_.assign(static_cast<size_t>(std::max(k, 1)) + 1, Traced<T>{T(0), 0, true});
    pw_[0] = Traced<T>{T(1), 0, true};
    pw_[1] = Traced<T>{x, 0, false};
    if (plan.parity == Parity::kOdd) {
      for (int p = 2; p <= k; p *= 2) pw_[p] = mul(pw_[p / 2], pw_[p / 2]);
      for (int j = 3; j < k; j += 2) {
        int a = floor_pow2_below(j);
        pw_[j] = mul(pw_[a], pw_[j - a]);
      }
    } else {
      for (int j = 2; j <= k; ++j) {
        int a = floor_pow2_below(j);
        pw_[j] = mul(pw_[a], pw_[j - a]);
      }
    }
    if (k >= 2) {
      giants_[k] = pw_[k];
      int g = k;
      for (int j = 1; j <= plan.giant_steps; ++j) {
        giants_[2 * g] = mul(giants_[g], giants_[g]);
        g *= 2;
      }
    }
  }

  Traced<T> run() { return eval(0, plan_.degree, plan_.depth); }
  int mults() const { return mults_; }

 private:
  Traced<T> mul(const Traced<T>& a, const Traced<T>& b) {
    Traced<T> r{a.v * b.v, std::max(a.depth, b.depth), a.constant && b.constant};
    if (!a.constant && !b.constant) {
      ++mults_;
      ++r.depth;
    }
    return r;
  }

  Traced<T> eval(int off, int deg, int budget) {
    auto it = plan_.splits.find({deg, budget});
    if (it == plan_.splits.end()) throw std::logic_error("evaluation plan is missing a node");
    const int G = it->second;
    if (G == 0) {
      Traced<T> acc{c_[static_cast<size_t>(off)], 0, true};
      for (int i = 1; i <= deg; ++i) {
        if (plan_.parity == Parity::kOdd && i % 2 == 0) continue;
        const Traced<T>& p = pw_[static_cast<size_t>(i)];
        acc.v += c_[static_cast<size_t>(off + i)] * p.v;
        acc.depth = std::max(acc.depth, p.depth);
        acc.constant = false;
      }
      return acc;
    }
    Traced<T> r = eval(off, G - 1, budget);
    const Traced<T>& xg = giants_.at(G);
    Traced<T> prod;
    if (deg == G) {
      prod = Traced<T>{c_[static_cast<size_t>(off + deg)] * xg.v, xg.depth, false};
    } else {
      Traced<T> q = eval(off + G, deg - G, budget - 1);
      prod = mul(q, xg);
    }
    Traced<T> out{prod.v + r.v, std::max(prod.depth, r.depth), prod.constant && r.constant};
    return out;
  }

  const std::vector<T>& c_;
  const EvalPlan& plan_;
  std::vector<Traced<T>> pw_;
  std::map<int, Traced<T>> giants_;
  int mults_ = 0;
};

template <class T>
T run_plan(const std::vector<T>& c, const T& x, const EvalPlan& plan, EvalStats* stats) {
  if (static_cast<int>(c.size()) - 1 != plan.degree) {
    throw std::invalid_argument("evaluation plan is for degree " + std::to_string(plan.degree) +
                                " but the polynomial has degree " +
                                std::to_string(static_cast<int>(c.size()) - 1));
  }
  if (plan.parity == Parity::kOdd) {
    for (size_t i = 0; i < c.size(); i += 2) {
      if (c[i] != T(0)) throw std::invalid_argument("odd evaluation plan on a non-odd polynomial");
    }
  }
  Executor<T> ex(c, x, plan);
  Traced<T> r = ex.run();
  if (stats) {
    stats->nonscalar_mults = ex.mults();
    stats->depth = r.depth;
  }
  return r.v;
}

}  // namespace

EvalPlan plan_bsgs(int degree, Parity parity) {
  if (degree < 0) throw std::invalid_argument("plan_bsgs: negative degree");
  if (parity == Parity::kEven) throw std::invalid_argument("plan_bsgs supports odd or general");
  const bool odd = parity == Parity::kOdd;
  if (odd && degree % 2 == 0) throw std::invalid_argument("odd plan needs an odd degree");
  EvalPlan plan;
  plan.degree = degree;
  plan.parity = parity;
  plan.depth = ceil_log2(static_cast<long>(degree) + 1);
  if (degree <= 1) {
    plan.baby_steps = 1;
    plan.splits[{degree, plan.depth}] = 0;
    return plan;
  }
  int best = kInf;
  Planner winner;
  auto consider = [&](Planner p, int setup) {
    int c = p.cost(degree, plan.depth).first;
    if (c >= kInf) return;
    if (setup + c < best) {
      best = setup + c;
      winner = std::move(p);
    }
  };
  if (odd) {
    const int lmax = ceil_log2(degree + 1) + 1;
    for (int l = 1; l <= lmax; ++l) {
      const int k = 1 << l;
      for (int J = 0; (k << J) <= std::max(degree, k); ++J) {
        consider(make_planner(true, k, J), odd_baby_cost(l) + J);
      }
    }
  } else {
    int s = 1;
    while (s * s < degree) ++s;
    const int kmax = 2 * s + 3;
    for (int k = 2; k <= kmax; ++k) {
      for (int J = 0; (k << J) <= std::max(degree, k); ++J) {
        consider(make_planner(false, k, J), k - 1 + J);
      }
    }
  }
  if (best >= kInf) throw std::logic_error("no depth-optimal schedule found");
  plan.baby_steps = winner.k;
  plan.giant_steps = static_cast<int>(winner.giants.size()) - 1;
  plan.nonscalar_mults = best;
  // Keep only the nodes reachable from the root.
  std::vector<std::pair<int, int>> stack{{degree, plan.depth}};
  while (!stack.empty()) {
    auto [d, b] = stack.back();
    stack.pop_back();
    if (plan.splits.count({d, b})) continue;
    const int G = winner.cost(d, b).second;
    plan.splits[{d, b}] = G;
    if (G == 0) continue;
    stack.push_back({G - 1, b});
    if (d > G) stack.push_back({d - G, b - 1});
  }
  // Measure the realised depth with a dry run on unit coefficients.
  std::vector<double> ones(static_cast<size_t>(degree) + 1, 1.0);
  if (odd) {
    for (size_t i = 0; i < ones.size(); i += 2) ones[i] = 0.0;
  }
  EvalStats st;
  run_plan(ones, 0.5, plan, &st);
  plan.circuit_depth = st.depth;
  return plan;
}

CompositeCost composite_cost(const std::vector<int>& degrees) {
  CompositeCost cc;
  for (int d : degrees) {
    cc.per_stage.push_back(plan_bsgs(d, Parity::kOdd));
    cc.total_mults += cc.per_stage.back().nonscalar_mults;
  }
  cc.total_mults += 1;
  cc.total_depth = composite_depth(degrees);
  return cc;
}

CompositeCost composite_cost(const ApproxSpec& spec) { return composite_cost(spec.degrees); }

double eval_bsgs(const std::vector<double>& c, double x, const EvalPlan& plan, EvalStats* stats) {
  return run_plan(c, x, plan, stats);
}

BigReal eval_bsgs(const std::vector<BigReal>& c, const BigReal& x, const EvalPlan& plan,
                  EvalStats* stats) {
  return run_plan(c, x, plan, stats);
}

namespace {

void check_parity(const Poly& p, const EvalPlan& plan) {
  if (plan.parity == Parity::kOdd && p.parity() != Parity::kOdd) {
    throw std::invalid_argument("odd evaluation plan on a polynomial not tagged odd");
  }
}

}  // namespace

double eval_bsgs(const Poly& p, double x, const EvalPlan& plan, EvalStats* stats) {
  check_parity(p, plan);
  Poly q = to_power_basis(p);
  std::vector<double> c;
  for (const BigReal& v : q.coeffs()) c.push_back(v.to_double());
  return run_plan(c, x, plan, stats);
}

BigReal eval_bsgs(const Poly& p, const BigReal& x, const EvalPlan& plan, EvalStats* stats) {
  check_parity(p, plan);
  Poly q = to_power_basis(p);
  return run_plan(q.coeffs(), x, plan, stats);
}

}  // namespace compoly

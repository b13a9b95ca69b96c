#include "normkit/sme.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace normkit::sme {

namespace {

using Pair = std::pair<std::size_t, std::size_t>;

bool entities_compatible(const Entity& b, const Entity& t) {
  const bool b_value = b.type == EntityType::value;
  const bool t_value = t.type == EntityType::value;
  if (b_value || t_value) return b_value && t_value && b.id == t.id;
  if (b.type && t.type) return *b.type == *t.type;
  return true;
}

// Entities that appear directly as an argument of some relation.
std::vector<bool> relation_arguments(const Dgroup& g) {
  std::vector<bool> out(g.entities.size(), false);
  for (const auto& e : g.expressions) {
    if (e.kind != ExprKind::relation) continue;
    for (const auto& a : e.args) {
      if (a.is_entity()) out[a.index] = true;
    }
  }
  return out;
}

class HypothesisBuilder {
 public:
  HypothesisBuilder(const Dgroup& base, const Dgroup& target, const ScoringParams& params)
      : base_(base), target_(target), params_(params) {}

  MatchHypotheses run() {
    for (std::size_t b = 0; b < base_.expressions.size(); ++b) {
      for (std::size_t t = 0; t < target_.expressions.size(); ++t) {
        const auto& be = base_.expressions[b];
        const auto& te = target_.expressions[t];
        if (be.kind == ExprKind::relation && te.kind == ExprKind::relation &&
            be.predicate == te.predicate && be.args.size() == te.args.size()) {
          add(b, t);
        }
      }
    }
    expand_functions();

    // Entity pairs aligned by the relational structure so far.
    std::set<Pair> aligned;
    for (const auto& [pair, index] : expr_index_) collect_entity_pairs(pair, aligned);

    const auto base_rel = relation_arguments(base_);
    const auto target_rel = relation_arguments(target_);
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t b = 0; b < base_.expressions.size(); ++b) {
        for (std::size_t t = 0; t < target_.expressions.size(); ++t) {
          const auto& be = base_.expressions[b];
          const auto& te = target_.expressions[t];
          if (be.kind != ExprKind::attribute || te.kind != ExprKind::attribute ||
              be.predicate != te.predicate || expr_index_.count({b, t})) {
            continue;
          }
          const ArgRef ba = be.args.front();
          const ArgRef ta = te.args.front();
          bool accept = false;
          if (ba.is_entity() && ta.is_entity()) {
            accept = entities_compatible(base_.entities[ba.index], target_.entities[ta.index]) &&
                     (aligned.count({ba.index, ta.index}) ||
                      (!base_rel[ba.index] && !target_rel[ta.index]));
          } else if (!ba.is_entity() && !ta.is_entity()) {
            const auto& bx = base_.expressions[ba.index];
            const auto& tx = target_.expressions[ta.index];
            accept = (bx.kind == ExprKind::function && tx.kind == ExprKind::function &&
                      bx.args.size() == tx.args.size()) ||
                     expr_index_.count({ba.index, ta.index});
          }
          if (accept) {
            add(b, t);
            grew = true;
          }
        }
      }
      if (grew) expand_functions();
    }

    MatchHypotheses out;
    for (const auto& [pair, index] : expr_index_) {
      const auto& be = base_.expressions[pair.first];
      const auto& te = target_.expressions[pair.second];
      out.expressions.push_back(MatchHypothesis{pair.first, pair.second, be.id, te.id, be.kind,
                                                be.predicate, te.predicate, params_.local_score});
    }
    std::set<Pair> entity_pairs;
    for (const auto& [pair, index] : expr_index_) collect_entity_pairs(pair, entity_pairs);
    for (const auto& [b, t] : entity_pairs) {
      out.entities.push_back(
          EntityCorrespondence{b, t, base_.entities[b].id, target_.entities[t].id});
    }
    return out;
  }

 private:
  void add(std::size_t b, std::size_t t) {
    if (expr_index_.emplace(Pair{b, t}, expr_index_.size()).second) frontier_.push_back({b, t});
  }

  // Function pairs under any matched parent, recursively.
  void expand_functions() {
    while (!frontier_.empty()) {
      const Pair p = frontier_.back();
      frontier_.pop_back();
      const auto& be = base_.expressions[p.first];
      const auto& te = target_.expressions[p.second];
      for (std::size_t i = 0; i < be.args.size(); ++i) {
        const ArgRef ba = be.args[i];
        const ArgRef ta = te.args[i];
        if (ba.is_entity() || ta.is_entity()) continue;
        const auto& bx = base_.expressions[ba.index];
        const auto& tx = target_.expressions[ta.index];
        if (bx.kind == ExprKind::function && tx.kind == ExprKind::function &&
            bx.args.size() == tx.args.size()) {
          add(ba.index, ta.index);
        }
      }
    }
  }

  void collect_entity_pairs(const Pair& p, std::set<Pair>& out) const {
    const auto& be = base_.expressions[p.first];
    const auto& te = target_.expressions[p.second];
    for (std::size_t i = 0; i < be.args.size(); ++i) {
      const ArgRef ba = be.args[i];
      const ArgRef ta = te.args[i];
      if (ba.is_entity() && ta.is_entity() &&
          entities_compatible(base_.entities[ba.index], target_.entities[ta.index])) {
        out.insert({ba.index, ta.index});
      }
    }
  }

  const Dgroup& base_;
  const Dgroup& target_;
  const ScoringParams& params_;
  std::map<Pair, std::size_t> expr_index_;
  std::vector<Pair> frontier_;
};

// Transitive expression ancestors for each expression of a group.
std::vector<std::vector<bool>> ancestor_table(const Dgroup& g) {
  const std::size_t n = g.expressions.size();
  std::vector<std::vector<std::size_t>> parents(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& a : g.expressions[i].args) {
      if (!a.is_entity()) parents[a.index].push_back(i);
    }
  }
  std::vector<std::vector<bool>> out(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> stack = parents[i];
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      if (out[i][p]) continue;
      out[i][p] = true;
      for (std::size_t q : parents[p]) stack.push_back(q);
    }
  }
  return out;
}

// Closure of one hypothesis: itself plus every hypothesis its arguments need.
struct Kernel {
  bool grounded = true;
  std::set<std::size_t> exprs;     // indices into MatchHypotheses::expressions
  std::set<std::size_t> entities;  // indices into MatchHypotheses::entities
};

class GmapExtractor {
 public:
  GmapExtractor(const Dgroup& base, const Dgroup& target, const ScoringParams& params)
      : base_(base), target_(target), params_(params),
        hyps_(build_match_hypotheses(base, target, params)) {
    for (std::size_t i = 0; i < hyps_.expressions.size(); ++i) {
      expr_at_[{hyps_.expressions[i].base, hyps_.expressions[i].target}] = i;
    }
    for (std::size_t i = 0; i < hyps_.entities.size(); ++i) {
      entity_at_[{hyps_.entities[i].base, hyps_.entities[i].target}] = i;
    }
  }

  std::vector<GMap> run() {
    const std::size_t n = hyps_.expressions.size();
    kernels_.assign(n, std::nullopt);
    std::vector<std::size_t> vertices;
    for (std::size_t i = 0; i < n; ++i) {
      const Kernel& k = kernel(i);
      if (k.grounded && one_to_one(k) && hyps_.expressions[i].kind != ExprKind::function) {
        vertices.push_back(i);
      }
    }

    const std::size_t v = vertices.size();
    compatible_.assign(v, std::vector<bool>(v, false));
    for (std::size_t a = 0; a < v; ++a) {
      for (std::size_t b = a + 1; b < v; ++b) {
        const bool ok = mergeable(kernel(vertices[a]), kernel(vertices[b]));
        compatible_[a][b] = compatible_[b][a] = ok;
      }
    }

    std::vector<std::size_t> r, p(v), x;
    for (std::size_t i = 0; i < v; ++i) p[i] = i;
    std::vector<std::vector<std::size_t>> cliques;
    bron_kerbosch(r, p, x, cliques);

    std::vector<GMap> out;
    std::set<std::vector<std::size_t>> seen;
    for (const auto& clique : cliques) {
      Kernel merged;
      for (std::size_t c : clique) {
        const Kernel& k = kernel(vertices[c]);
        merged.exprs.insert(k.exprs.begin(), k.exprs.end());
        merged.entities.insert(k.entities.begin(), k.entities.end());
      }
      std::vector<std::size_t> key(merged.exprs.begin(), merged.exprs.end());
      if (!seen.insert(key).second) continue;
      out.push_back(to_gmap(merged));
    }
    std::sort(out.begin(), out.end(), [](const GMap& a, const GMap& b) {
      if (a.structural_score != b.structural_score) return a.structural_score > b.structural_score;
      auto pairs = [](const GMap& g) {
        std::vector<Pair> ps;
        for (const auto& m : g.correspondences) ps.emplace_back(m.base, m.target);
        return ps;
      };
      return pairs(a) < pairs(b);
    });
    return out;
  }

 private:
  const Kernel& kernel(std::size_t i) {
    if (kernels_[i]) return *kernels_[i];
    Kernel k;
    k.exprs.insert(i);
    const auto& mh = hyps_.expressions[i];
    const auto& be = base_.expressions[mh.base];
    const auto& te = target_.expressions[mh.target];
    for (std::size_t a = 0; a < be.args.size(); ++a) {
      const ArgRef ba = be.args[a];
      const ArgRef ta = te.args[a];
      if (ba.is_entity() != ta.is_entity()) {
        k.grounded = false;
        continue;
      }
      if (ba.is_entity()) {
        auto it = entity_at_.find({ba.index, ta.index});
        if (it == entity_at_.end()) {
          k.grounded = false;
        } else {
          k.entities.insert(it->second);
        }
        continue;
      }
      auto it = expr_at_.find({ba.index, ta.index});
      if (it == expr_at_.end()) {
        k.grounded = false;
        continue;
      }
      const Kernel& child = kernel(it->second);
      k.grounded = k.grounded && child.grounded;
      k.exprs.insert(child.exprs.begin(), child.exprs.end());
      k.entities.insert(child.entities.begin(), child.entities.end());
    }
    kernels_[i] = std::move(k);
    return *kernels_[i];
  }

  bool one_to_one(const Kernel& k) const { return mergeable(k, Kernel{}); }

  // True when the union of two kernels maps every item one-to-one.
  bool mergeable(const Kernel& a, const Kernel& b) const {
    std::map<std::size_t, std::size_t> eb, et, nb, nt;
    auto put = [](std::map<std::size_t, std::size_t>& m, std::size_t from, std::size_t to) {
      auto [it, fresh] = m.emplace(from, to);
      return fresh || it->second == to;
    };
    for (const Kernel* k : {&a, &b}) {
      for (std::size_t i : k->exprs) {
        const auto& mh = hyps_.expressions[i];
        if (!put(eb, mh.base, mh.target) || !put(et, mh.target, mh.base)) return false;
      }
      for (std::size_t i : k->entities) {
        const auto& ec = hyps_.entities[i];
        if (!put(nb, ec.base, ec.target) || !put(nt, ec.target, ec.base)) return false;
      }
    }
    return true;
  }

  void bron_kerbosch(std::vector<std::size_t>& r, std::vector<std::size_t> p,
                     std::vector<std::size_t> x, std::vector<std::vector<std::size_t>>& out) {
    if (p.empty() && x.empty()) {
      out.push_back(r);
      return;
    }
    std::size_t pivot = p.empty() ? x.front() : p.front();
    std::size_t best = 0;
    for (const auto* set : {&p, &x}) {
      for (std::size_t u : *set) {
        std::size_t count = 0;
        for (std::size_t w : p) count += compatible_[u][w];
        if (count > best) {
          best = count;
          pivot = u;
        }
      }
    }
    const std::vector<std::size_t> candidates = [&] {
      std::vector<std::size_t> c;
      for (std::size_t w : p) {
        if (!compatible_[pivot][w]) c.push_back(w);
      }
      return c;
    }();
    for (std::size_t w : candidates) {
      std::vector<std::size_t> np, nx;
      for (std::size_t u : p) {
        if (compatible_[w][u]) np.push_back(u);
      }
      for (std::size_t u : x) {
        if (compatible_[w][u]) nx.push_back(u);
      }
      r.push_back(w);
      bron_kerbosch(r, std::move(np), std::move(nx), out);
      r.pop_back();
      p.erase(std::find(p.begin(), p.end(), w));
      x.push_back(w);
    }
  }

  GMap to_gmap(const Kernel& k) const {
    GMap g;
    for (std::size_t i : k.exprs) g.correspondences.push_back(hyps_.expressions[i]);
    for (std::size_t i : k.entities) g.entity_map.push_back(hyps_.entities[i]);
    std::sort(g.correspondences.begin(), g.correspondences.end(),
              [](const auto& a, const auto& b) { return std::tie(a.base, a.target) < std::tie(b.base, b.target); });
    std::sort(g.entity_map.begin(), g.entity_map.end(),
              [](const auto& a, const auto& b) { return std::tie(a.base, a.target) < std::tie(b.base, b.target); });
    g.structural_score = structural_score(g, base_, params_);
    g.candidate_inferences = candidate_inferences(g, base_);
    return g;
  }

  const Dgroup& base_;
  const Dgroup& target_;
  const ScoringParams& params_;
  MatchHypotheses hyps_;
  std::map<Pair, std::size_t> expr_at_;
  std::map<Pair, std::size_t> entity_at_;
  std::vector<std::optional<Kernel>> kernels_;
  std::vector<std::vector<bool>> compatible_;
};

}  // namespace

MatchHypotheses build_match_hypotheses(const Dgroup& base, const Dgroup& target,
                                       const ScoringParams& params) {
  return HypothesisBuilder(base, target, params).run();
}

std::vector<GMap> extract_gmaps(const Dgroup& base, const Dgroup& target,
                                const ScoringParams& params) {
  return GmapExtractor(base, target, params).run();
}

double structural_score(const GMap& gmap, const Dgroup& base, const ScoringParams& params) {
  const auto ancestors = ancestor_table(base);
  double total = 0.0;
  for (const auto& m : gmap.correspondences) {
    std::size_t matched_ancestors = 0;
    for (const auto& other : gmap.correspondences) {
      if (other.base != m.base && ancestors[m.base][other.base]) ++matched_ancestors;
    }
    total += m.local_score + params.ancestor_bonus * static_cast<double>(matched_ancestors);
  }
  return total;
}

double self_score(const Dgroup& group, const ScoringParams& params) {
  // Not simply every expression: a function no relation uses can never be
  // matched, so the best self-mapping is the honest ceiling.
  const auto gmaps = extract_gmaps(group, group, params);
  return gmaps.empty() ? 0.0 : gmaps.front().structural_score;
}

SimilarityResult similarity(const Dgroup& base, const Dgroup& target, const ScoringParams& params) {
  SimilarityResult result;
  result.all_gmaps = extract_gmaps(base, target, params);
  if (!result.all_gmaps.empty()) result.best_gmap = result.all_gmaps.front();

  const double denominator = std::max(self_score(base, params), self_score(target, params));
  if (denominator <= 0.0) {
    // Neither side has any structure: isomorphic iff the entity type
    // multisets agree.
    auto types = [](const Dgroup& g) {
      std::vector<int> t;
      for (const auto& e : g.entities) t.push_back(e.type ? static_cast<int>(*e.type) : -1);
      std::sort(t.begin(), t.end());
      return t;
    };
    result.score = types(base) == types(target) ? 1.0 : 0.0;
    return result;
  }
  const double best = result.all_gmaps.empty() ? 0.0 : result.best_gmap.structural_score;
  result.score = std::clamp(best / denominator, 0.0, 1.0);
  return result;
}

std::vector<ExprTemplate> candidate_inferences(const GMap& gmap, const Dgroup& base) {
  const std::size_t n = base.expressions.size();
  std::vector<const MatchHypothesis*> matched(n, nullptr);
  for (const auto& m : gmap.correspondences) {
    if (m.base < n) matched[m.base] = &m;
  }
  std::map<std::size_t, std::string> entity_target;
  for (const auto& e : gmap.entity_map) entity_target.emplace(e.base, e.target_id);

  std::vector<int> anchored(n, -1);  // -1 unknown, 0 no, 1 yes
  auto is_anchored = [&](auto&& self, std::size_t i) -> bool {
    if (anchored[i] >= 0) return anchored[i] == 1;
    bool yes = false;
    for (const auto& a : base.expressions[i].args) {
      if (a.is_entity()) {
        yes = yes || entity_target.count(a.index);
      } else {
        yes = yes || matched[a.index] != nullptr || self(self, a.index);
      }
    }
    anchored[i] = yes ? 1 : 0;
    return yes;
  };

  std::vector<bool> nested(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (matched[i] || !is_anchored(is_anchored, i)) continue;
    for (const auto& a : base.expressions[i].args) {
      if (!a.is_entity() && !matched[a.index]) nested[a.index] = true;
    }
  }

  std::map<std::size_t, std::string> skolems;
  auto translate = [&](auto&& self, std::size_t i) -> ExprTemplate {
    const Expression& e = base.expressions[i];
    ExprTemplate t;
    t.kind = e.kind;
    t.matched = matched[i] != nullptr;
    t.predicate = t.matched ? matched[i]->target_predicate : e.predicate;
    for (const auto& a : e.args) {
      TemplateArg arg;
      if (!a.is_entity()) {
        arg.kind = TemplateArg::Kind::expression;
        arg.nested.push_back(self(self, a.index));
      } else if (auto it = entity_target.find(a.index); it != entity_target.end()) {
        arg.name = it->second;
      } else if (base.entities[a.index].type == EntityType::value) {
        arg.name = base.entities[a.index].id;
      } else {
        arg.kind = TemplateArg::Kind::skolem;
        auto [sk, fresh] = skolems.try_emplace(a.index, "");
        if (fresh) sk->second = "skolem" + std::to_string(skolems.size());
        arg.name = sk->second;
      }
      t.args.push_back(std::move(arg));
    }
    return t;
  };

  std::vector<ExprTemplate> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (matched[i] || nested[i] || !is_anchored(is_anchored, i)) continue;
    out.push_back(translate(translate, i));
  }
  return out;
}

std::string to_string(const ExprTemplate& t) {
  std::string out = t.predicate + "(";
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ',';
    const auto& a = t.args[i];
    out += a.kind == TemplateArg::Kind::expression ? to_string(a.nested.front()) : a.name;
  }
  return out + ")";
}

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::contradicted: return "contradicted";
    case Verdict::unknown: return "unknown";
  }
  return "?";
}

namespace {

Term template_term(const ExprTemplate& t) {
  std::vector<Term> args;
  for (const auto& a : t.args) {
    switch (a.kind) {
      case TemplateArg::Kind::entity: args.push_back(Term::constant(a.name)); break;
      case TemplateArg::Kind::skolem: args.push_back(Term::variable(a.name)); break;
      case TemplateArg::Kind::expression: args.push_back(template_term(a.nested.front())); break;
    }
  }
  return Term::function(t.predicate, std::move(args));
}

}  // namespace

Predicate template_predicate(const ExprTemplate& t) {
  Term term = template_term(t);
  return Predicate{std::move(term.name), std::move(term.args)};
}

Verdict verify_candidate_inference(const ExprTemplate& candidate, const Scene& facts) {
  const Predicate claim = template_predicate(candidate);
  for (const auto& f : facts.facts) {
    if (unify(claim, f.predicate)) return Verdict::holds;
  }
  const Predicate negated{"not", {as_term(claim)}};
  for (const auto& f : facts.facts) {
    if (unify(negated, f.predicate)) return Verdict::contradicted;
  }
  return Verdict::unknown;
}

Scene dgroup_facts(const Dgroup& group) {
  Scene scene;
  for (const auto& e : group.entities) scene.objects.push_back(e.id);
  auto term_of = [&](auto&& self, std::size_t i) -> Term {
    const Expression& e = group.expressions[i];
    std::vector<Term> args;
    for (const auto& a : e.args) {
      args.push_back(a.is_entity() ? Term::constant(group.entities[a.index].id)
                                   : self(self, a.index));
    }
    return Term::function(e.predicate, std::move(args));
  };
  for (std::size_t i = 0; i < group.expressions.size(); ++i) {
    Term t = term_of(term_of, i);
    scene.facts.push_back(Fact{Predicate{t.name, t.args}, BeliefInterval::certain(),
                               FactSource::percept});
  }
  return scene;
}

}  // namespace normkit::sme

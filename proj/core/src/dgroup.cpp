#include "normkit/dgroup.hpp"

#include <map>
#include <set>
#include <unordered_map>

#include "normkit/error.hpp"
#include "normkit/sexpr.hpp"

namespace normkit::sme {

std::string_view to_string(EntityType type) noexcept {
  switch (type) {
    case EntityType::agent: return "agent";
    case EntityType::object: return "object";
    case EntityType::value: return "value";
  }
  return "?";
}

std::string_view to_string(ExprKind kind) noexcept {
  switch (kind) {
    case ExprKind::relation: return "relation";
    case ExprKind::attribute: return "attribute";
    case ExprKind::function: return "function";
  }
  return "?";
}

std::optional<std::size_t> Dgroup::find_entity(std::string_view id) const {
  for (std::size_t i = 0; i < entities.size(); ++i) {
    if (entities[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Dgroup::find_expression(std::string_view id) const {
  for (std::size_t i = 0; i < expressions.size(); ++i) {
    if (expressions[i].id == id) return i;
  }
  return std::nullopt;
}

const Annotation* Dgroup::find_annotation(std::string_view key) const {
  for (const auto& a : annotations) {
    if (a.key == key) return &a;
  }
  return nullptr;
}

std::vector<std::string> Dgroup::isolated_entities() const {
  std::vector<bool> used(entities.size(), false);
  for (const auto& e : expressions) {
    for (const auto& a : e.args) {
      if (a.is_entity() && a.index < used.size()) used[a.index] = true;
    }
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < entities.size(); ++i) {
    if (!used[i]) out.push_back(entities[i].id);
  }
  return out;
}

namespace {

struct Problem {
  bool on_expression = false;
  std::size_t index = 0;
  std::string message;
};

std::optional<Problem> find_problem(const Dgroup& g) {
  std::set<std::string> ids;
  for (std::size_t i = 0; i < g.entities.size(); ++i) {
    if (g.entities[i].id.empty()) return Problem{false, i, "empty entity id"};
    if (!ids.insert(g.entities[i].id).second) {
      return Problem{false, i, "duplicate id '" + g.entities[i].id + "'"};
    }
  }
  std::map<std::string, std::size_t> arity;
  for (std::size_t i = 0; i < g.expressions.size(); ++i) {
    const Expression& e = g.expressions[i];
    if (e.id.empty()) return Problem{true, i, "empty expression id"};
    if (!ids.insert(e.id).second) return Problem{true, i, "duplicate id '" + e.id + "'"};
    if (e.args.empty()) return Problem{true, i, "expression '" + e.id + "' has no arguments"};
    if (e.kind == ExprKind::attribute && e.args.size() != 1) {
      return Problem{true, i, "attribute '" + e.predicate + "' must take exactly one argument"};
    }
    auto [it, fresh] = arity.try_emplace(e.predicate, e.args.size());
    if (!fresh && it->second != e.args.size()) {
      return Problem{true, i, "arity clash: '" + e.predicate + "' used with " +
                                  std::to_string(e.args.size()) + " and " +
                                  std::to_string(it->second) + " arguments"};
    }
    for (const auto& a : e.args) {
      const std::size_t bound = a.is_entity() ? g.entities.size() : g.expressions.size();
      if (a.index >= bound) {
        return Problem{true, i, "expression '" + e.id + "' has a dangling argument"};
      }
    }
  }

  // Cycle check over expression-to-expression references.
  enum class Mark : unsigned char { fresh, active, done };
  std::vector<Mark> marks(g.expressions.size(), Mark::fresh);
  std::optional<Problem> cycle;
  auto visit = [&](auto&& self, std::size_t i) -> bool {
    marks[i] = Mark::active;
    for (const auto& a : g.expressions[i].args) {
      if (a.is_entity()) continue;
      if (marks[a.index] == Mark::active) {
        cycle = Problem{true, i, "reference cycle through '" + g.expressions[i].id + "'"};
        return false;
      }
      if (marks[a.index] == Mark::fresh && !self(self, a.index)) return false;
    }
    marks[i] = Mark::done;
    return true;
  };
  for (std::size_t i = 0; i < g.expressions.size(); ++i) {
    if (marks[i] == Mark::fresh && !visit(visit, i)) return cycle;
  }
  return std::nullopt;
}

}  // namespace

void Dgroup::validate() const {
  if (auto p = find_problem(*this)) throw ModelError("dgroup '" + name + "': " + p->message);
}

DgroupBuilder::DgroupBuilder(std::string name) { group_.name = std::move(name); }

DgroupBuilder& DgroupBuilder::entity(std::string id, std::optional<EntityType> type) {
  group_.entities.push_back(Entity{std::move(id), type});
  return *this;
}

DgroupBuilder& DgroupBuilder::expr(std::string id, ExprKind kind, std::string predicate,
                                   const std::vector<std::string>& args) {
  Expression e{std::move(id), std::move(predicate), kind, {}};
  for (const auto& a : args) {
    if (auto ent = group_.find_entity(a)) {
      e.args.push_back({ArgRef::Kind::entity, *ent});
    } else if (auto ex = group_.find_expression(a)) {
      e.args.push_back({ArgRef::Kind::expression, *ex});
    } else {
      throw ModelError("dgroup '" + group_.name + "': unresolved reference '" + a + "' in '" +
                       e.id + "'");
    }
  }
  group_.expressions.push_back(std::move(e));
  return *this;
}

DgroupBuilder& DgroupBuilder::annotate(std::string key, std::vector<std::string> values) {
  group_.annotations.push_back(Annotation{std::move(key), std::move(values)});
  return *this;
}

bool DgroupBuilder::has(std::string_view id) const {
  return group_.find_entity(id) || group_.find_expression(id);
}

Dgroup DgroupBuilder::build() const {
  group_.validate();
  return group_;
}

namespace {

using sexpr::Value;

class DgroupReader {
 public:
  explicit DgroupReader(std::string source) : source_(std::move(source)) {}

  Dgroup read(const Value& form) {
    if (!form.is_form("dgroup")) fail(form.pos, "expected (dgroup <name> ...)");
    if (form.items.size() < 2 || !form.items[1].is_atom()) {
      fail(form.pos, "dgroup needs a name");
    }
    Dgroup g;
    g.name = form.items[1].text;
    bool saw_entities = false;
    for (std::size_t i = 2; i < form.items.size(); ++i) {
      const Value& item = form.items[i];
      const std::string_view head = item.head();
      if (head == "entities") {
        if (saw_entities) fail(item.pos, "duplicate (entities ...) form");
        saw_entities = true;
        entities(item, g);
      } else if (head == "expr") {
        expression(item, g);
      } else if (head == "exprs") {
        for (std::size_t j = 1; j < item.items.size(); ++j) {
          if (!item.items[j].is_form("expr")) fail(item.items[j].pos, "expected (expr ...)");
          expression(item.items[j], g);
        }
      } else if (head == "label" || head == "provenance") {
        Annotation a{std::string(head), {}};
        for (std::size_t j = 1; j < item.items.size(); ++j) {
          if (!item.items[j].is_atom()) fail(item.items[j].pos, "annotation values must be atoms");
          a.values.push_back(item.items[j].text);
        }
        for (const auto& prior : g.annotations) {
          if (prior.key == a.key) fail(item.pos, "duplicate (" + a.key + " ...) form");
        }
        g.annotations.push_back(std::move(a));
      } else {
        fail(item.pos, "unknown dgroup form" + (head.empty() ? std::string() : " '" + std::string(head) + "'"));
      }
    }
    resolve(g);
    return g;
  }

 private:
  [[noreturn]] void fail(SourcePosition pos, const std::string& message) const {
    throw ParseError(source_, pos, message);
  }

  const std::string& atom(const Value& v, const char* what) const {
    if (!v.is_atom()) fail(v.pos, std::string("expected ") + what);
    return v.text;
  }

  void entities(const Value& form, Dgroup& g) {
    for (std::size_t j = 1; j < form.items.size(); ++j) {
      const Value& v = form.items[j];
      Entity e;
      if (v.is_atom()) {
        e.id = v.text;
      } else if (v.is_list() && v.items.size() == 2) {
        e.id = atom(v.items[0], "entity id");
        const std::string& type = atom(v.items[1], "entity type");
        if (type == "agent") e.type = EntityType::agent;
        else if (type == "object") e.type = EntityType::object;
        else if (type == "value") e.type = EntityType::value;
        else fail(v.items[1].pos, "unknown entity type '" + type + "'");
      } else {
        fail(v.pos, "expected <id> or (<id> <type>)");
      }
      declare(e.id, v.pos);
      entity_pos_.push_back(v.pos);
      g.entities.push_back(std::move(e));
    }
  }

  void expression(const Value& form, Dgroup& g) {
    if (form.items.size() != 3) fail(form.pos, "expected (expr <id> (<kind> <predicate> <arg>...))");
    const std::string& id = atom(form.items[1], "expression id");
    const Value& body = form.items[2];
    if (!body.is_list() || body.items.size() < 3) {
      fail(body.pos, "expected (<kind> <predicate> <arg>...)");
    }
    Expression e;
    e.id = id;
    const std::string& kind = atom(body.items[0], "expression kind");
    if (kind == "relation") e.kind = ExprKind::relation;
    else if (kind == "attribute") e.kind = ExprKind::attribute;
    else if (kind == "function") e.kind = ExprKind::function;
    else fail(body.items[0].pos, "unknown expression kind '" + kind + "'");
    e.predicate = atom(body.items[1], "predicate");
    std::vector<std::pair<std::string, SourcePosition>> args;
    for (std::size_t j = 2; j < body.items.size(); ++j) {
      args.emplace_back(atom(body.items[j], "argument id"), body.items[j].pos);
    }
    declare(id, form.pos);
    pending_args_.push_back(std::move(args));
    expr_pos_.push_back(form.pos);
    g.expressions.push_back(std::move(e));
  }

  void declare(const std::string& id, SourcePosition pos) {
    if (auto [it, fresh] = declared_.try_emplace(id, pos); !fresh) {
      fail(pos, "duplicate id '" + id + "' (first declared at line " +
                    std::to_string(it->second.line) + ")");
    }
  }

  void resolve(Dgroup& g) {
    std::unordered_map<std::string, ArgRef> index;
    for (std::size_t i = 0; i < g.entities.size(); ++i) {
      index.emplace(g.entities[i].id, ArgRef{ArgRef::Kind::entity, i});
    }
    for (std::size_t i = 0; i < g.expressions.size(); ++i) {
      index.emplace(g.expressions[i].id, ArgRef{ArgRef::Kind::expression, i});
    }
    for (std::size_t i = 0; i < g.expressions.size(); ++i) {
      for (const auto& [name, pos] : pending_args_[i]) {
        auto it = index.find(name);
        if (it == index.end()) fail(pos, "unresolved reference '" + name + "'");
        g.expressions[i].args.push_back(it->second);
      }
    }
    if (auto p = find_problem(g)) {
      fail(p->on_expression ? expr_pos_[p->index] : entity_pos_[p->index], p->message);
    }
  }

  std::string source_;
  std::map<std::string, SourcePosition> declared_;
  std::vector<SourcePosition> entity_pos_;
  std::vector<SourcePosition> expr_pos_;
  std::vector<std::vector<std::pair<std::string, SourcePosition>>> pending_args_;
};

}  // namespace

std::vector<Dgroup> parse_dgroups(std::string_view text, std::string_view source_name) {
  std::vector<Dgroup> out;
  for (const auto& form : sexpr::read_all(text, source_name)) {
    out.push_back(DgroupReader(std::string(source_name)).read(form));
  }
  return out;
}

Dgroup parse_dgroup(std::string_view text, std::string_view source_name) {
  auto forms = sexpr::read_all(text, source_name);
  if (forms.size() != 1) {
    const SourcePosition pos = forms.empty() ? SourcePosition{1, 1} : forms[1].pos;
    throw ParseError(std::string(source_name), pos, "expected exactly one (dgroup ...) form");
  }
  return DgroupReader(std::string(source_name)).read(forms.front());
}

std::string serialize(const Dgroup& g) {
  std::string out = "(dgroup " + g.name + "\n  (entities";
  for (const auto& e : g.entities) {
    out += ' ';
    if (e.type) out += "(" + e.id + " " + std::string(to_string(*e.type)) + ")";
    else out += e.id;
  }
  out += ")";
  for (const auto& e : g.expressions) {
    out += "\n  (expr " + e.id + " (" + std::string(to_string(e.kind)) + " " + e.predicate;
    for (const auto& a : e.args) {
      out += ' ';
      out += a.is_entity() ? g.entities[a.index].id : g.expressions[a.index].id;
    }
    out += "))";
  }
  for (const auto& a : g.annotations) {
    out += "\n  (" + a.key;
    for (const auto& v : a.values) out += " " + v;
    out += ")";
  }
  out += ")\n";
  return out;
}

}  // namespace normkit::sme

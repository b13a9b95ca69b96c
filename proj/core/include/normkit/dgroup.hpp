#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace normkit::sme {

enum class EntityType { agent, object, value };
enum class ExprKind { relation, attribute, function };

std::string_view to_string(EntityType type) noexcept;
std::string_view to_string(ExprKind kind) noexcept;

struct Entity {
  std::string id;
  std::optional<EntityType> type;

  friend bool operator==(const Entity&, const Entity&) = default;
};

struct ArgRef {
  enum class Kind : unsigned char { entity, expression };
  Kind kind = Kind::entity;
  std::size_t index = 0;

  bool is_entity() const noexcept { return kind == Kind::entity; }
  friend bool operator==(const ArgRef&, const ArgRef&) = default;
};

struct Expression {
  std::string id;
  std::string predicate;
  ExprKind kind = ExprKind::relation;
  std::vector<ArgRef> args;

  friend bool operator==(const Expression&, const Expression&) = default;
};

/// Extra `(key value...)` forms carried with a description group, such as
/// `(label acceptability violation)` or `(provenance observation)`.
struct Annotation {
  std::string key;
  std::vector<std::string> values;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// A description group: entities plus a DAG of predicate expressions over
/// them. Ids are unique across entities and expressions; attributes are
/// unary; each predicate keeps one arity.
struct Dgroup {
  std::string name;
  std::vector<Entity> entities;
  std::vector<Expression> expressions;
  std::vector<Annotation> annotations;

  std::optional<std::size_t> find_entity(std::string_view id) const;
  std::optional<std::size_t> find_expression(std::string_view id) const;
  const Annotation* find_annotation(std::string_view key) const;

  /// Entities no expression mentions.
  std::vector<std::string> isolated_entities() const;

  /// Throws ModelError on any broken invariant.
  void validate() const;

  friend bool operator==(const Dgroup&, const Dgroup&) = default;
};

/// Incremental construction by id; arguments may name entities or
/// expressions already added.
class DgroupBuilder {
 public:
  explicit DgroupBuilder(std::string name);

  DgroupBuilder& entity(std::string id, std::optional<EntityType> type = std::nullopt);
  DgroupBuilder& expr(std::string id, ExprKind kind, std::string predicate,
                      const std::vector<std::string>& args);
  DgroupBuilder& relation(std::string id, std::string predicate, const std::vector<std::string>& args) {
    return expr(std::move(id), ExprKind::relation, std::move(predicate), args);
  }
  DgroupBuilder& attribute(std::string id, std::string predicate, const std::string& arg) {
    return expr(std::move(id), ExprKind::attribute, std::move(predicate), {arg});
  }
  DgroupBuilder& function(std::string id, std::string predicate, const std::vector<std::string>& args) {
    return expr(std::move(id), ExprKind::function, std::move(predicate), args);
  }
  DgroupBuilder& annotate(std::string key, std::vector<std::string> values);

  bool has(std::string_view id) const;

  /// Validates and returns the finished group.
  Dgroup build() const;

 private:
  Dgroup group_;
};

/// File format:
///   (dgroup <name>
///     (entities <id> (<id> agent|object|value) ...)
///     (expr <id> (relation|attribute|function <predicate> <arg>...))
///     ...
///     (label acceptability violation))
/// `(exprs (expr ...) ...)` may group expressions. `;` comments.
Dgroup parse_dgroup(std::string_view text, std::string_view source_name = "<dgroup>");
std::vector<Dgroup> parse_dgroups(std::string_view text, std::string_view source_name = "<dgroup>");

/// Canonical multi-line rendering; parsing it yields an equal Dgroup.
std::string serialize(const Dgroup& group);

}  // namespace normkit::sme

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "normkit/dgroup.hpp"
#include "normkit/sme.hpp"

namespace normkit {

enum class Acceptability { acceptable, violation };

std::string_view to_string(Acceptability a) noexcept;
std::optional<Acceptability> parse_acceptability(std::string_view text) noexcept;

/// A labeled precedent. The label and provenance live in these fields; the
/// dgroup itself carries no annotations.
struct Case {
  sme::Dgroup dgroup;
  Acceptability acceptability = Acceptability::acceptable;
  std::string provenance = "experience";

  const std::string& name() const noexcept { return dgroup.name; }

  friend bool operator==(const Case&, const Case&) = default;
};

/// Accepted provenance values.
bool is_known_provenance(std::string_view p) noexcept;

/// An immutable, name-indexed set of cases in insertion order.
class CaseLibrary {
 public:
  CaseLibrary() = default;
  /// Throws ModelError on duplicate names or an invalid dgroup.
  explicit CaseLibrary(std::vector<Case> cases);

  const std::vector<Case>& cases() const noexcept { return cases_; }
  std::size_t size() const noexcept { return cases_.size(); }
  bool empty() const noexcept { return cases_.empty(); }
  const Case* find(std::string_view name) const;

  /// A new library with `c` appended.
  CaseLibrary with(Case c) const;

  friend bool operator==(const CaseLibrary&, const CaseLibrary&) = default;

 private:
  std::vector<Case> cases_;
};

/// A dgroup file whose `(label acceptability <value>)` form is mandatory;
/// `(provenance <value>)` defaults to experience.
Case parse_case(std::string_view text, std::string_view source_name = "<case>");
std::vector<Case> parse_cases(std::string_view text, std::string_view source_name = "<case>");
std::string serialize_case(const Case& c);

/// A directory (every `*.case` file, by file name) or one file holding any
/// number of cases. Throws IoError if the path is missing.
CaseLibrary load_library(const std::filesystem::path& path);

/// Writes `<name>.case` per case into `dir`, creating it if needed.
void save_library(const CaseLibrary& library, const std::filesystem::path& dir);

struct RetrievedCase {
  const Case* precedent = nullptr;
  double score = 0.0;
  sme::GMap best_gmap;  // precedent as base, query as target

  const std::string& name() const noexcept { return precedent->name(); }
  Acceptability acceptability() const noexcept { return precedent->acceptability; }
};

/// Scores every case against `query` (case as base), sorts by score
/// descending then name, keeps the first k. The library must outlive the
/// result.
std::vector<RetrievedCase> retrieve(const CaseLibrary& library, const sme::Dgroup& query,
                                    std::size_t k = 3, const sme::ScoringParams& params = {});

}  // namespace normkit

#include "normkit/case_library.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "normkit/error.hpp"
#include "normkit/sexpr.hpp"

namespace normkit {

namespace fs = std::filesystem;

std::string_view to_string(Acceptability a) noexcept {
  return a == Acceptability::violation ? "violation" : "acceptable";
}

std::optional<Acceptability> parse_acceptability(std::string_view text) noexcept {
  if (text == "acceptable") return Acceptability::acceptable;
  if (text == "violation") return Acceptability::violation;
  return std::nullopt;
}

bool is_known_provenance(std::string_view p) noexcept {
  return p == "experience" || p == "instruction" || p == "observation" || p == "demonstration";
}

CaseLibrary::CaseLibrary(std::vector<Case> cases) : cases_(std::move(cases)) {
  std::set<std::string> names;
  for (const auto& c : cases_) {
    c.dgroup.validate();
    if (!names.insert(c.name()).second) throw ModelError("duplicate case name '" + c.name() + "'");
  }
}

const Case* CaseLibrary::find(std::string_view name) const {
  for (const auto& c : cases_) {
    if (c.name() == name) return &c;
  }
  return nullptr;
}

CaseLibrary CaseLibrary::with(Case c) const {
  std::vector<Case> next = cases_;
  next.push_back(std::move(c));
  return CaseLibrary(std::move(next));
}

namespace {

Case to_case(sme::Dgroup g, std::string_view source, SourcePosition pos) {
  auto fail = [&](const std::string& message) {
    throw ParseError(std::string(source), pos, "case '" + g.name + "': " + message);
  };
  Case c;
  const auto* label = g.find_annotation("label");
  if (!label) fail("missing (label acceptability ...) form");
  if (label->values.size() != 2 || label->values[0] != "acceptability") {
    fail("label must read (label acceptability acceptable|violation)");
  }
  auto a = parse_acceptability(label->values[1]);
  if (!a) fail("unknown acceptability '" + label->values[1] + "'");
  c.acceptability = *a;
  if (const auto* p = g.find_annotation("provenance")) {
    if (p->values.size() != 1 || !is_known_provenance(p->values[0])) {
      fail("provenance must be one of experience, instruction, observation, demonstration");
    }
    c.provenance = p->values[0];
  }
  g.annotations.clear();
  c.dgroup = std::move(g);
  return c;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Case parse_case(std::string_view text, std::string_view source_name) {
  sme::Dgroup g = sme::parse_dgroup(text, source_name);
  const auto forms = sexpr::read_all(text, source_name);
  return to_case(std::move(g), source_name, forms.front().pos);
}

std::vector<Case> parse_cases(std::string_view text, std::string_view source_name) {
  auto groups = sme::parse_dgroups(text, source_name);
  const auto forms = sexpr::read_all(text, source_name);
  std::vector<Case> out;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    out.push_back(to_case(std::move(groups[i]), source_name, forms[i].pos));
  }
  return out;
}

std::string serialize_case(const Case& c) {
  sme::Dgroup g = c.dgroup;
  g.annotations = {{"label", {"acceptability", std::string(to_string(c.acceptability))}},
                   {"provenance", {c.provenance}}};
  return sme::serialize(g);
}

CaseLibrary load_library(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw IoError("case library not found: " + path.string());
  std::vector<Case> cases;
  if (fs::is_directory(path, ec)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".case") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      for (auto& c : parse_cases(read_file(f), f.string())) cases.push_back(std::move(c));
    }
  } else {
    cases = parse_cases(read_file(path), path.string());
  }
  return CaseLibrary(std::move(cases));
}

void save_library(const CaseLibrary& library, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& c : library.cases()) {
    const fs::path file = dir / (c.name() + ".case");
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write " + file.string());
    out << serialize_case(c);
  }
}

std::vector<RetrievedCase> retrieve(const CaseLibrary& library, const sme::Dgroup& query,
                                    std::size_t k, const sme::ScoringParams& params) {
  if (k == 0) throw DomainError("retrieve needs k >= 1");
  std::vector<RetrievedCase> ranked;
  for (const auto& c : library.cases()) {
    auto result = sme::similarity(c.dgroup, query, params);
    ranked.push_back(RetrievedCase{&c, result.score, std::move(result.best_gmap)});
  }
  std::sort(ranked.begin(), ranked.end(), [](const RetrievedCase& a, const RetrievedCase& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.name() < b.name();
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

}  // namespace normkit

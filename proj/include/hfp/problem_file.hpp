#pragma once

// Problem files: a strict, line-oriented key/value format with sections.
//
//   # comment
//   [problem]
//   dimension = 2
//   mu = 1
//   x1 = 5, 5
//
//   [set]
//   kind = ball
//   center = 0, 0
//   radius = 10
//
// Vectors are comma separated, matrix rows are separated by ';'.
// Intersections list their parts in sections [set.part.1], [set.part.2], ...
// Unknown sections and keys are rejected.

#include "hfp/core.hpp"
#include "hfp/fixtures.hpp"
#include "hfp/geometry.hpp"
#include "hfp/operators.hpp"
#include "hfp/schedules.hpp"
#include "hfp/solver.hpp"
#include "hfp/text.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hfp::config {

/// Syntax or schema error, located by 1-based line and column (line 0 for
/// command-line overrides).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string source, std::size_t line, std::size_t column, const std::string& message)
        : std::runtime_error(format(source, line, column, message)),
          source_(std::move(source)),
          line_(line),
          column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& source() const { return source_; }

private:
    static std::string format(const std::string& source, std::size_t line, std::size_t column,
                              const std::string& message) {
        std::ostringstream out;
        if (line == 0) out << "override: " << message;
        else out << source << ":" << line << ":" << column << ": " << message;
        return out.str();
    }

    std::string source_;
    std::size_t line_;
    std::size_t column_;
};

struct RawEntry {
    std::string key;
    std::string value;
    std::size_t line = 0;
    std::size_t key_column = 0;
    std::size_t value_column = 0;
};

struct RawSection {
    std::string name;
    std::size_t line = 0;
    std::vector<RawEntry> entries;

    const RawEntry* find(std::string_view key) const {
        for (const auto& e : entries) {
            if (e.key == key) return &e;
        }
        return nullptr;
    }
};

struct RawDocument {
    std::string source = "<input>";
    std::vector<RawSection> sections;

    const RawSection* find(std::string_view name) const {
        for (const auto& s : sections) {
            if (s.name == name) return &s;
        }
        return nullptr;
    }
    RawSection* find(std::string_view name) {
        for (auto& s : sections) {
            if (s.name == name) return &s;
        }
        return nullptr;
    }
};

namespace detail {

inline bool is_name_char(char c, bool allow_dot) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
           (allow_dot && c == '.');
}

inline bool valid_name(std::string_view s, bool allow_dot) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [&](char c) { return is_name_char(c, allow_dot); });
}

} // namespace detail

/// Splits text into sections and key/value entries; no schema knowledge.
inline RawDocument parse_raw(std::string_view text, std::string source = "<input>") {
    RawDocument doc;
    doc.source = std::move(source);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos) continue;
        const std::size_t col = first + 1;
        std::string_view body = text::trim(line);

        if (body.front() == '[') {
            if (body.back() != ']') throw ParseError(doc.source, line_no, col, "unterminated section header");
            const std::string_view name = text::trim(body.substr(1, body.size() - 2));
            if (!detail::valid_name(name, true)) {
                throw ParseError(doc.source, line_no, col + 1, "invalid section name");
            }
            if (doc.find(name) != nullptr) {
                throw ParseError(doc.source, line_no, col, "duplicate section [" + std::string(name) + "]");
            }
            doc.sections.push_back({std::string(name), line_no, {}});
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(doc.source, line_no, col, "expected 'key = value'");
        const std::string_view key = text::trim(line.substr(0, eq));
        if (!detail::valid_name(key, false)) throw ParseError(doc.source, line_no, col, "invalid key");
        const std::string_view raw_value = line.substr(eq + 1);
        const auto vfirst = raw_value.find_first_not_of(" \t\r");
        const std::size_t vcol = vfirst == std::string_view::npos ? eq + 2 : eq + 2 + vfirst;
        const std::string_view value = text::trim(raw_value);
        if (value.empty()) throw ParseError(doc.source, line_no, vcol, "missing value for key '" + std::string(key) + "'");
        if (doc.sections.empty()) throw ParseError(doc.source, line_no, col, "key outside of any section");
        auto& sec = doc.sections.back();
        if (sec.find(key) != nullptr) {
            throw ParseError(doc.source, line_no, col, "duplicate key '" + std::string(key) + "'");
        }
        sec.entries.push_back({std::string(key), std::string(value), line_no, col, vcol});
    }
    return doc;
}

/// Applies `section.key=value`, replacing or adding the entry.
inline void apply_override(RawDocument& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ParseError(doc.source, 0, 0, "expected section.key=value, got '" + std::string(assignment) + "'");
    }
    const std::string_view lhs = text::trim(assignment.substr(0, eq));
    const std::string_view value = text::trim(assignment.substr(eq + 1));
    const auto dot = lhs.rfind('.');
    if (dot == std::string_view::npos || value.empty()) {
        throw ParseError(doc.source, 0, 0, "expected section.key=value, got '" + std::string(assignment) + "'");
    }
    const std::string_view section = lhs.substr(0, dot);
    const std::string_view key = lhs.substr(dot + 1);
    if (!detail::valid_name(section, true) || !detail::valid_name(key, false)) {
        throw ParseError(doc.source, 0, 0, "invalid name in override '" + std::string(assignment) + "'");
    }
    RawSection* sec = doc.find(section);
    if (sec == nullptr) {
        doc.sections.push_back({std::string(section), 0, {}});
        sec = &doc.sections.back();
    }
    for (auto& e : sec->entries) {
        if (e.key == key) {
            e.value = std::string(value);
            e.line = 0;
            return;
        }
    }
    sec->entries.push_back({std::string(key), std::string(value), 0, 0, 0});
}

using Param = std::variant<double, std::vector<double>, std::vector<std::vector<double>>>;

/// A set (kind = set variant) or a mapping (kind = fixture name) with its
/// parameters; intersections carry their parts.
struct ComponentConfig {
    std::string kind;
    std::map<std::string, Param> params;
    std::vector<ComponentConfig> parts;
    bool operator==(const ComponentConfig&) const = default;
};

struct FixSetConfig {
    std::string kind;  ///< singleton | points | subset
    std::vector<std::vector<double>> points;
    std::vector<ComponentConfig> subset;  ///< exactly one entry for kind = subset
    bool operator==(const FixSetConfig&) const = default;
};

struct ProblemConfig {
    std::size_t dimension = 0;
    double rho = 0.0;
    double mu = 1.0;
    std::string variant = "full_power";
    std::vector<double> x1;
    std::uint64_t seed = 0;
    std::optional<std::vector<double>> reference;
    std::size_t power_budget = 100'000'000;
    ComponentConfig set;
    ComponentConfig T;
    ComponentConfig S;
    ComponentConfig V;
    ComponentConfig F;
    PowerFamily schedule;
    std::optional<FixSetConfig> fix_set;
    StopRule stop;
    std::optional<std::string> trace;
    bool timing = false;

    bool operator==(const ProblemConfig&) const = default;
};

enum class ParamType { Scalar, Vec, Mat };

struct ParamSpec {
    const char* name;
    ParamType type;
    bool required;
};

using Schema = std::map<std::string, std::vector<ParamSpec>, std::less<>>;

inline const Schema& set_schemas() {
    static const Schema schemas = {
        {"whole_space", {}},
        {"ball", {{"center", ParamType::Vec, true}, {"radius", ParamType::Scalar, true}}},
        {"box", {{"lower", ParamType::Vec, true}, {"upper", ParamType::Vec, true}}},
        {"halfspace", {{"normal", ParamType::Vec, true}, {"offset", ParamType::Scalar, true}}},
        {"hyperplane", {{"normal", ParamType::Vec, true}, {"offset", ParamType::Scalar, true}}},
        {"intersection", {{"tolerance", ParamType::Scalar, false}, {"max_cycles", ParamType::Scalar, false}}},
    };
    return schemas;
}

inline const Schema& fixture_schemas() {
    static const Schema schemas = {
        {"identity", {}},
        {"zero", {}},
        {"constant", {{"value", ParamType::Vec, true}}},
        {"scaled", {{"k", ParamType::Scalar, true}}},
        {"contraction", {{"k", ParamType::Scalar, true}}},
        {"linear",
         {{"matrix", ParamType::Mat, true}, {"eta", ParamType::Scalar, false}, {"L", ParamType::Scalar, false}}},
        {"proj_affine", {{"normal", ParamType::Vec, true}, {"offset", ParamType::Scalar, true}}},
        {"rotation", {{"theta", ParamType::Scalar, true}, {"radius", ParamType::Scalar, false}}},
        {"averaged_rotation",
         {{"lambda", ParamType::Scalar, true},
          {"theta", ParamType::Scalar, true},
          {"radius", ParamType::Scalar, false}}},
        {"sahu_step", {}},
    };
    return schemas;
}

namespace detail {

/// Typed access to one raw section; remembers which keys were read so that
/// leftovers can be reported as unknown.
class SectionReader {
public:
    SectionReader(const RawDocument& doc, const RawSection& sec) : doc_(doc), sec_(sec) {}

    const RawSection& section() const { return sec_; }

    [[noreturn]] void fail(const RawEntry& e, std::size_t column, const std::string& msg) const {
        throw ParseError(doc_.source, e.line, e.line == 0 ? 0 : column, msg);
    }

    [[noreturn]] void fail_section(const std::string& msg) const {
        throw ParseError(doc_.source, sec_.line, sec_.line == 0 ? 0 : 1, msg);
    }

    const RawEntry* take(std::string_view key) {
        const RawEntry* e = sec_.find(key);
        if (e != nullptr) used_.insert(std::string(key));
        return e;
    }

    const RawEntry& require(std::string_view key) {
        const RawEntry* e = take(key);
        if (e == nullptr) fail_section("missing key '" + std::string(key) + "' in section [" + sec_.name + "]");
        return *e;
    }

    double scalar(const RawEntry& e) const {
        auto v = text::parse_double(e.value);
        if (!v || !std::isfinite(*v)) fail(e, e.value_column, "expected a finite number for '" + e.key + "'");
        return *v;
    }

    std::uint64_t integer(const RawEntry& e) const {
        auto v = text::parse_uint(e.value);
        if (!v) fail(e, e.value_column, "expected a nonnegative integer for '" + e.key + "'");
        return *v;
    }

    std::vector<double> vec(const RawEntry& e) const {
        std::vector<double> out;
        for (auto part : text::split(e.value, ',')) {
            auto v = text::parse_double(part);
            if (!v || !std::isfinite(*v)) fail(e, e.value_column, "expected a comma-separated list of numbers for '" + e.key + "'");
            out.push_back(*v);
        }
        return out;
    }

    std::vector<std::vector<double>> mat(const RawEntry& e) const {
        std::vector<std::vector<double>> out;
        for (auto row : text::split(e.value, ';')) {
            RawEntry tmp = e;
            tmp.value = std::string(row);
            out.push_back(vec(tmp));
        }
        return out;
    }

    std::optional<double> tolerance(const RawEntry& e) const {
        if (text::trim(e.value) == "off") return std::nullopt;
        const double v = scalar(e);
        if (v < 0.0) fail(e, e.value_column, "tolerance must be nonnegative or 'off'");
        return v;
    }

    bool boolean(const RawEntry& e) const {
        const auto v = text::trim(e.value);
        if (v == "true") return true;
        if (v == "false") return false;
        fail(e, e.value_column, "expected 'true' or 'false' for '" + e.key + "'");
    }

    void finish() const {
        for (const auto& e : sec_.entries) {
            if (used_.count(e.key) == 0) {
                fail(e, e.key_column, "unknown key '" + e.key + "' in section [" + sec_.name + "]");
            }
        }
    }

private:
    const RawDocument& doc_;
    const RawSection& sec_;
    std::set<std::string> used_;
};

class DocumentReader {
public:
    explicit DocumentReader(const RawDocument& doc) : doc_(doc) {}

    const RawSection* take(std::string_view name) {
        const RawSection* s = doc_.find(name);
        if (s != nullptr) used_.insert(std::string(name));
        return s;
    }

    const RawSection& require(std::string_view name) {
        const RawSection* s = take(name);
        if (s == nullptr) throw ParseError(doc_.source, 1, 1, "missing section [" + std::string(name) + "]");
        return *s;
    }

    void finish() const {
        for (const auto& s : doc_.sections) {
            if (used_.count(s.name) == 0) {
                throw ParseError(doc_.source, s.line, s.line == 0 ? 0 : 1, "unknown section [" + s.name + "]");
            }
        }
    }

    const RawDocument& doc() const { return doc_; }

private:
    const RawDocument& doc_;
    std::set<std::string> used_;
};

inline ComponentConfig read_component(DocumentReader& docr, const RawSection& sec, const Schema& schema,
                                      const char* kind_key, bool allow_parts) {
    SectionReader r(docr.doc(), sec);
    const RawEntry& kind_entry = r.require(kind_key);
    const auto it = schema.find(kind_entry.value);
    if (it == schema.end()) {
        r.fail(kind_entry, kind_entry.value_column,
               "unknown " + std::string(kind_key) + " '" + kind_entry.value + "' in section [" + sec.name + "]");
    }
    ComponentConfig c;
    c.kind = kind_entry.value;
    for (const ParamSpec& ps : it->second) {
        const RawEntry* e = ps.required ? &r.require(ps.name) : r.take(ps.name);
        if (e == nullptr) continue;
        switch (ps.type) {
            case ParamType::Scalar: c.params[ps.name] = r.scalar(*e); break;
            case ParamType::Vec: c.params[ps.name] = r.vec(*e); break;
            case ParamType::Mat: c.params[ps.name] = r.mat(*e); break;
        }
    }
    r.finish();
    if (c.kind == "intersection") {
        if (!allow_parts) r.fail_section("nested intersections are not supported");
        for (std::size_t i = 1;; ++i) {
            const RawSection* part = docr.take(sec.name + ".part." + std::to_string(i));
            if (part == nullptr) break;
            c.parts.push_back(read_component(docr, *part, schema, kind_key, false));
        }
        if (c.parts.empty()) r.fail_section("intersection in [" + sec.name + "] has no [" + sec.name + ".part.1] section");
    }
    return c;
}

} // namespace detail

/// Schema-checked conversion of a raw document into a ProblemConfig.
inline ProblemConfig read_config(const RawDocument& doc) {
    using detail::SectionReader;
    detail::DocumentReader docr(doc);
    ProblemConfig cfg;

    {
        SectionReader r(doc, docr.require("problem"));
        const RawEntry& dim = r.require("dimension");
        cfg.dimension = r.integer(dim);
        if (cfg.dimension == 0) r.fail(dim, dim.value_column, "dimension must be positive");
        if (auto* e = r.take("rho")) cfg.rho = r.scalar(*e);
        if (auto* e = r.take("mu")) cfg.mu = r.scalar(*e);
        if (auto* e = r.take("variant")) {
            if (!parse_method(e->value)) r.fail(*e, e->value_column, "unknown variant '" + e->value + "'");
            cfg.variant = e->value;
        }
        cfg.x1 = r.vec(r.require("x1"));
        if (auto* e = r.take("seed")) cfg.seed = r.integer(*e);
        if (auto* e = r.take("reference")) cfg.reference = r.vec(*e);
        if (auto* e = r.take("power_budget")) cfg.power_budget = r.integer(*e);
        r.finish();
    }

    cfg.set = detail::read_component(docr, docr.require("set"), set_schemas(), "kind", true);
    cfg.T = detail::read_component(docr, docr.require("T"), fixture_schemas(), "fixture", false);
    cfg.S = detail::read_component(docr, docr.require("S"), fixture_schemas(), "fixture", false);
    cfg.V = detail::read_component(docr, docr.require("V"), fixture_schemas(), "fixture", false);
    cfg.F = detail::read_component(docr, docr.require("F"), fixture_schemas(), "fixture", false);

    if (const RawSection* sec = docr.take("schedule")) {
        SectionReader r(doc, *sec);
        if (auto* e = r.take("alpha0")) cfg.schedule.alpha0 = r.scalar(*e);
        if (auto* e = r.take("p")) cfg.schedule.p = r.scalar(*e);
        if (auto* e = r.take("beta0")) cfg.schedule.beta0 = r.scalar(*e);
        if (auto* e = r.take("q")) cfg.schedule.q = r.scalar(*e);
        r.finish();
    }

    if (const RawSection* sec = docr.take("fix_set")) {
        SectionReader r(doc, *sec);
        FixSetConfig fix;
        const RawEntry& kind = r.require("kind");
        fix.kind = kind.value;
        if (fix.kind == "singleton") {
            fix.points.push_back(r.vec(r.require("point")));
        } else if (fix.kind == "points") {
            fix.points = r.mat(r.require("points"));
        } else if (fix.kind == "subset") {
            fix.subset.push_back(detail::read_component(docr, docr.require("fix_set.set"), set_schemas(), "kind", true));
        } else {
            r.fail(kind, kind.value_column, "unknown fix_set kind '" + kind.value + "' (singleton, points, subset)");
        }
        r.finish();
        cfg.fix_set = std::move(fix);
    }

    if (const RawSection* sec = docr.take("stop")) {
        SectionReader r(doc, *sec);
        if (auto* e = r.take("max_iters")) {
            cfg.stop.max_iters = r.integer(*e);
            if (cfg.stop.max_iters == 0) r.fail(*e, e->value_column, "max_iters must be positive");
        }
        if (auto* e = r.take("tol_step")) cfg.stop.tol_step = r.tolerance(*e);
        if (auto* e = r.take("tol_fix")) cfg.stop.tol_fix = r.tolerance(*e);
        if (auto* e = r.take("tol_vi")) cfg.stop.tol_vi = r.tolerance(*e);
        r.finish();
    }

    if (const RawSection* sec = docr.take("output")) {
        SectionReader r(doc, *sec);
        if (auto* e = r.take("trace")) cfg.trace = e->value;
        if (auto* e = r.take("timing")) cfg.timing = r.boolean(*e);
        r.finish();
    }

    docr.finish();
    return cfg;
}

inline ProblemConfig parse_config(std::string_view text, std::string source = "<input>",
                                  const std::vector<std::string>& overrides = {}) {
    RawDocument doc = parse_raw(text, std::move(source));
    for (const auto& o : overrides) apply_override(doc, o);
    return read_config(doc);
}

/// Reads a problem file from disk. I/O failures surface as ParseError at 0:0.
inline ProblemConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, 1, 0, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path, overrides);
}

namespace detail {

inline std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += ", ";
        out += text::format_double(v[i]);
    }
    return out;
}

inline std::string join(const std::vector<std::vector<double>>& m) {
    std::string out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i > 0) out += "; ";
        out += join(m[i]);
    }
    return out;
}

inline void write_component(std::ostream& out, const std::string& section, const ComponentConfig& c,
                            const char* kind_key) {
    out << "[" << section << "]\n" << kind_key << " = " << c.kind << "\n";
    for (const auto& [key, value] : c.params) {
        out << key << " = ";
        std::visit(
            [&out](const auto& v) {
                using K = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<K, double>) out << text::format_double(v);
                else out << join(v);
            },
            value);
        out << "\n";
    }
    out << "\n";
    for (std::size_t i = 0; i < c.parts.size(); ++i) {
        write_component(out, section + ".part." + std::to_string(i + 1), c.parts[i], kind_key);
    }
}

inline std::string tolerance_text(const std::optional<double>& t) {
    return t ? text::format_double(*t) : std::string("off");
}

} // namespace detail

/// Canonical text form; parse_config(to_text(c)) == c.
inline std::string to_text(const ProblemConfig& c) {
    std::ostringstream out;
    out << "[problem]\n"
        << "dimension = " << c.dimension << "\n"
        << "rho = " << text::format_double(c.rho) << "\n"
        << "mu = " << text::format_double(c.mu) << "\n"
        << "variant = " << c.variant << "\n"
        << "x1 = " << detail::join(c.x1) << "\n"
        << "seed = " << c.seed << "\n";
    if (c.reference) out << "reference = " << detail::join(*c.reference) << "\n";
    out << "power_budget = " << c.power_budget << "\n\n";

    detail::write_component(out, "set", c.set, "kind");
    detail::write_component(out, "T", c.T, "fixture");
    detail::write_component(out, "S", c.S, "fixture");
    detail::write_component(out, "V", c.V, "fixture");
    detail::write_component(out, "F", c.F, "fixture");

    out << "[schedule]\n"
        << "alpha0 = " << text::format_double(c.schedule.alpha0) << "\n"
        << "p = " << text::format_double(c.schedule.p) << "\n"
        << "beta0 = " << text::format_double(c.schedule.beta0) << "\n"
        << "q = " << text::format_double(c.schedule.q) << "\n\n";

    if (c.fix_set) {
        out << "[fix_set]\nkind = " << c.fix_set->kind << "\n";
        if (c.fix_set->kind == "singleton" && !c.fix_set->points.empty()) {
            out << "point = " << detail::join(c.fix_set->points.front()) << "\n";
        } else if (c.fix_set->kind == "points") {
            out << "points = " << detail::join(c.fix_set->points) << "\n";
        }
        out << "\n";
        if (c.fix_set->kind == "subset" && !c.fix_set->subset.empty()) {
            detail::write_component(out, "fix_set.set", c.fix_set->subset.front(), "kind");
        }
    }

    out << "[stop]\n"
        << "max_iters = " << c.stop.max_iters << "\n"
        << "tol_step = " << detail::tolerance_text(c.stop.tol_step) << "\n"
        << "tol_fix = " << detail::tolerance_text(c.stop.tol_fix) << "\n"
        << "tol_vi = " << detail::tolerance_text(c.stop.tol_vi) << "\n\n";

    out << "[output]\n";
    if (c.trace) out << "trace = " << *c.trace << "\n";
    out << "timing = " << (c.timing ? "true" : "false") << "\n";
    return out.str();
}

namespace detail {

inline Vector to_vector(const std::vector<double>& v, std::size_t dim, const std::string& what) {
    if (v.size() != dim) {
        throw ProblemError(what + " has " + std::to_string(v.size()) + " entries, expected " + std::to_string(dim));
    }
    return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

inline double param_scalar(const ComponentConfig& c, const char* key, double fallback) {
    auto it = c.params.find(key);
    return it == c.params.end() ? fallback : std::get<double>(it->second);
}

inline double param_scalar(const ComponentConfig& c, const char* key) {
    return std::get<double>(c.params.at(key));
}

inline Vector param_vector(const ComponentConfig& c, const char* key, std::size_t dim, const std::string& owner) {
    return to_vector(std::get<std::vector<double>>(c.params.at(key)), dim, owner + "." + key);
}

} // namespace detail

inline ConvexSet build_set(const ComponentConfig& c, std::size_t dim, const std::string& owner = "set") {
    using namespace detail;
    const auto d = static_cast<Index>(dim);
    if (c.kind == "whole_space") return ConvexSet::whole_space(d);
    if (c.kind == "ball") return ConvexSet::ball(param_vector(c, "center", dim, owner), param_scalar(c, "radius"));
    if (c.kind == "box") return ConvexSet::box(param_vector(c, "lower", dim, owner), param_vector(c, "upper", dim, owner));
    if (c.kind == "halfspace") return ConvexSet::halfspace(param_vector(c, "normal", dim, owner), param_scalar(c, "offset"));
    if (c.kind == "hyperplane") return ConvexSet::hyperplane(param_vector(c, "normal", dim, owner), param_scalar(c, "offset"));
    if (c.kind == "intersection") {
        std::vector<ConvexSet> parts;
        for (std::size_t i = 0; i < c.parts.size(); ++i) {
            parts.push_back(build_set(c.parts[i], dim, owner + ".part." + std::to_string(i + 1)));
        }
        DykstraOptions opts;
        opts.tolerance = param_scalar(c, "tolerance", opts.tolerance);
        const double cycles = param_scalar(c, "max_cycles", static_cast<double>(opts.max_cycles));
        if (!(cycles >= 1.0)) throw ProblemError(owner + ".max_cycles must be at least 1");
        opts.max_cycles = static_cast<std::size_t>(cycles);
        return ConvexSet::intersection(std::move(parts), opts);
    }
    throw ProblemError("unknown set kind '" + c.kind + "'");
}

inline Mapping build_mapping(const ComponentConfig& c, std::size_t dim, const std::string& owner) {
    using namespace detail;
    const auto d = static_cast<Index>(dim);
    const auto& k = c.kind;
    auto require_planar = [&] {
        if (dim != 2) throw ProblemError(owner + ": fixture '" + k + "' requires dimension 2");
    };
    if (k == "identity") return fixtures::identity(d);
    if (k == "zero") return fixtures::zero(d);
    if (k == "constant") return fixtures::constant(param_vector(c, "value", dim, owner));
    if (k == "scaled") return fixtures::scaled(param_scalar(c, "k"), d);
    if (k == "contraction") return fixtures::contraction(param_scalar(c, "k"), d);
    if (k == "linear") {
        const auto& rows = std::get<std::vector<std::vector<double>>>(c.params.at("matrix"));
        if (rows.size() != dim) throw ProblemError(owner + ".matrix must have " + std::to_string(dim) + " rows");
        Matrix A(d, d);
        for (std::size_t i = 0; i < dim; ++i) A.row(static_cast<Index>(i)) = to_vector(rows[i], dim, owner + ".matrix row").transpose();
        const bool has_eta = c.params.count("eta") != 0;
        const bool has_L = c.params.count("L") != 0;
        if (has_eta != has_L) throw ProblemError(owner + ": declare both eta and L or neither");
        if (has_eta) return fixtures::linear(std::move(A), param_scalar(c, "eta"), param_scalar(c, "L"));
        return fixtures::linear(std::move(A));
    }
    if (k == "proj_affine") return fixtures::proj_affine(param_vector(c, "normal", dim, owner), param_scalar(c, "offset"));
    if (k == "rotation") {
        require_planar();
        return fixtures::rotation(param_scalar(c, "theta"), param_scalar(c, "radius", fixtures::kRotationDomainRadius));
    }
    if (k == "averaged_rotation") {
        require_planar();
        return fixtures::averaged_rotation(param_scalar(c, "lambda"), param_scalar(c, "theta"),
                                           param_scalar(c, "radius", fixtures::kRotationDomainRadius));
    }
    if (k == "sahu_step") {
        if (dim != 1) throw ProblemError(owner + ": fixture 'sahu_step' requires dimension 1");
        return fixtures::sahu_step();
    }
    throw ProblemError(owner + ": unknown fixture '" + k + "'");
}

/// Builds the solver problem. Throws ProblemError or UsageError for
/// semantically invalid content.
inline ProblemSpec build_problem(const ProblemConfig& c) {
    const std::size_t dim = c.dimension;
    ProblemSpec p{
        .C = build_set(c.set, dim),
        .T = build_mapping(c.T, dim, "T"),
        .S = build_mapping(c.S, dim, "S"),
        .V = build_mapping(c.V, dim, "V"),
        .F = build_mapping(c.F, dim, "F"),
        .rho = c.rho,
        .mu = c.mu,
        .schedule = Schedule::power(c.schedule),
        .mode = FullPower{},
        .x1 = detail::to_vector(c.x1, dim, "problem.x1"),
    };
    if (c.reference) p.reference = detail::to_vector(*c.reference, dim, "problem.reference");
    p.seed = c.seed;
    p.power_budget = c.power_budget;
    if (c.fix_set) {
        const auto& f = *c.fix_set;
        if (f.kind == "singleton") {
            p.fix_set = Singleton{detail::to_vector(f.points.at(0), dim, "fix_set.point")};
        } else if (f.kind == "points") {
            SampledPoints pts;
            for (const auto& q : f.points) pts.points.push_back(detail::to_vector(q, dim, "fix_set.points"));
            p.fix_set = std::move(pts);
        } else {
            p.fix_set = ConvexSubset{build_set(f.subset.at(0), dim, "fix_set.set")};
        }
    }
    const auto method = parse_method(c.variant);
    if (!method) throw ProblemError("unknown variant '" + c.variant + "'");
    return reduce_variant(std::move(p), *method);
}

} // namespace hfp::config

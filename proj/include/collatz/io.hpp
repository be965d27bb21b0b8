#pragma once

// Text (appendix layout), JSON and CSV renderings, plus the class-list parser.

#include <collatz/enumeration.hpp>
#include <collatz/limits.hpp>
#include <collatz/stopping.hpp>
#include <collatz/subseq.hpp>

#include <json.hpp>

#include <istream>
#include <sstream>
#include <string>
#include <vector>

namespace nlohmann {

// Arbitrary-precision integers travel as decimal strings.
template <>
struct adl_serializer<collatz::BigInt> {
    static void to_json(json& j, const collatz::BigInt& n) { j = n.str(); }
    static void from_json(const json& j, collatz::BigInt& n) {
        const auto s = j.get<std::string>();
        if (!s.empty() && s[0] == '-') {
            n = -collatz::parse_decimal(s.substr(1));
        } else {
            n = collatz::parse_decimal(s);
        }
    }
};

template <class T>
struct adl_serializer<std::optional<T>> {
    static void to_json(json& j, const std::optional<T>& v) {
        if (v) {
            j = *v;
        } else {
            j = nullptr;
        }
    }
    static void from_json(const json& j, std::optional<T>& v) {
        if (j.is_null()) {
            v.reset();
        } else {
            v = j.get<T>();
        }
    }
};

} // namespace nlohmann

namespace collatz {

using json = nlohmann::json;

// ---- appendix-style text ----

/// One class listing: header line, comma-separated residues, "(mod M)".
struct ClassBlock {
    std::string header;
    std::vector<std::uint64_t> residues;
    std::uint64_t modulus = 0;

    friend bool operator==(const ClassBlock&, const ClassBlock&) = default;
};

template <class Seq>
std::string join_comma(const Seq& items) {
    std::ostringstream out;
    bool first = true;
    for (const auto& x : items) {
        if (!first) {
            out << ", ";
        }
        out << x;
        first = false;
    }
    return out.str();
}

inline std::string render_block(const ClassBlock& b) {
    return b.header + "\n" + join_comma(b.residues) + "\n(mod " + std::to_string(b.modulus) + ")\n";
}

/// Blocks separated by one blank line.
inline std::string render_blocks(const std::vector<ClassBlock>& blocks) {
    std::string out;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i > 0) {
            out += "\n";
        }
        out += render_block(blocks[i]);
    }
    return out;
}

inline ClassBlock to_block(const LengthClassReport& r) {
    return {std::string(kind_name(r.kind)) + "=" + std::to_string(r.length), r.classes, r.modulus};
}

inline ClassBlock to_block(const SigmaClassReport& r) {
    return {"sigma=" + std::to_string(r.sigma), r.classes, r.modulus};
}

/// The tau block of a report, e.g. "n=8, sigma=13, A_3(n)=40".
inline ClassBlock to_block(const TauClassReport& r, std::uint64_t tau_value) {
    const auto it = r.classes.find(tau_value);
    ClassBlock b;
    if (it != r.classes.end()) {
        b.residues = it->second;
    }
    b.header = "n=" + std::to_string(r.n) + ", sigma=" + std::to_string(r.sigma) + ", A_" +
               std::to_string(tau_value) + "(n)=" + std::to_string(b.residues.size());
    b.modulus = r.modulus;
    return b;
}

inline std::vector<ClassBlock> to_blocks(const TauClassReport& r) {
    std::vector<ClassBlock> out;
    for (const auto& [t, list] : r.classes) {
        out.push_back(to_block(r, t));
    }
    return out;
}

inline std::string render_terms(const std::vector<Term>& terms) { return join_comma(terms); }

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) {
        return "";
    }
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::uint64_t> parse_residue_line(const std::string& line) {
    std::vector<std::uint64_t> out;
    std::istringstream in(line);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        const BigInt v = parse_decimal(tok);
        if (!fits_u64(v)) {
            throw FormatError("residue out of range: " + tok);
        }
        out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
}

} // namespace detail

/// Parses text produced by render_blocks.
inline std::vector<ClassBlock> parse_blocks(std::istream& in) {
    std::vector<ClassBlock> out;
    std::vector<std::string> pending;
    auto flush = [&] {
        if (pending.empty()) {
            return;
        }
        if (pending.size() < 3) {
            throw FormatError("class block '" + pending.front() + "' is incomplete");
        }
        ClassBlock b;
        b.header = pending.front();
        const std::string& tail = pending.back();
        if (tail.size() < 7 || tail.compare(0, 5, "(mod ") != 0 || tail.back() != ')') {
            throw FormatError("class block '" + b.header + "' does not end with '(mod M)'");
        }
        b.modulus = static_cast<std::uint64_t>(parse_decimal(tail.substr(5, tail.size() - 6)));
        std::string body;
        for (std::size_t i = 1; i + 1 < pending.size(); ++i) {
            body += (body.empty() ? "" : ",") + pending[i];
        }
        b.residues = detail::parse_residue_line(body);
        out.push_back(std::move(b));
        pending.clear();
    };
    std::string line;
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (line.empty()) {
            flush();
        } else {
            pending.push_back(line);
        }
    }
    flush();
    return out;
}

inline std::vector<ClassBlock> parse_blocks(const std::string& text) {
    std::istringstream in(text);
    return parse_blocks(in);
}

/// Lines of comma-separated terms, e.g. "9, 14, 7".
inline std::vector<std::vector<Term>> parse_term_lines(std::istream& in) {
    std::vector<std::vector<Term>> out;
    std::string line;
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        std::vector<Term> row;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) {
            row.push_back(parse_decimal(detail::trim(tok)));
        }
        out.push_back(std::move(row));
    }
    return out;
}

// ---- JSON ----

inline void to_json(json& j, const SubsequenceKind& k) { j = kind_name(k); }
inline void from_json(const json& j, SubsequenceKind& k) {
    const auto s = j.get<std::string>();
    if (s == "t") {
        k = SubsequenceKind::t_kind;
    } else if (s == "h") {
        k = SubsequenceKind::h_kind;
    } else {
        throw FormatError("unknown subsequence kind '" + s + "'");
    }
}

inline void to_json(json& j, const Variant& v) { j = variant_name(v); }
inline void from_json(const json& j, Variant& v) {
    const auto s = j.get<std::string>();
    if (s == "A") {
        v = Variant::a;
    } else if (s == "B") {
        v = Variant::b;
    } else {
        throw FormatError("unknown variant '" + s + "'");
    }
}

inline void to_json(json& j, const Trajectory& t) { j = json{{"terms", t.terms}, {"complete", t.complete}}; }
inline void from_json(const json& j, Trajectory& t) {
    j.at("terms").get_to(t.terms);
    j.at("complete").get_to(t.complete);
}

inline void to_json(json& j, const Subsequence& s) {
    j = json{{"kind", s.kind},       {"variant", s.variant},   {"length", s.length_index},
             {"terms", s.terms},     {"max_odd", s.max_odd},   {"max_even", s.max_even},
             {"end_term", s.end_term}};
}
inline void from_json(const json& j, Subsequence& s) {
    j.at("kind").get_to(s.kind);
    j.at("variant").get_to(s.variant);
    j.at("length").get_to(s.length_index);
    j.at("terms").get_to(s.terms);
    j.at("max_odd").get_to(s.max_odd);
    j.at("max_even").get_to(s.max_even);
    j.at("end_term").get_to(s.end_term);
}

inline void to_json(json& j, const DecompositionEntry& e) {
    j = json{{"subsequence", e.subsequence}, {"entry_offset", e.entry_offset}};
}
inline void from_json(const json& j, DecompositionEntry& e) {
    j.at("subsequence").get_to(e.subsequence);
    j.at("entry_offset").get_to(e.entry_offset);
}

inline void to_json(json& j, const Decomposition& d) {
    j = json{{"source", d.source}, {"preamble", d.preamble}, {"entries", d.entries}, {"complete", d.complete}};
}
inline void from_json(const json& j, Decomposition& d) {
    j.at("source").get_to(d.source);
    j.at("preamble").get_to(d.preamble);
    j.at("entries").get_to(d.entries);
    j.at("complete").get_to(d.complete);
}

inline void to_json(json& j, const LengthClassException& e) {
    j = json{{"value", e.value}, {"actual_length", e.actual_length}, {"variant", e.variant}};
}
inline void from_json(const json& j, LengthClassException& e) {
    j.at("value").get_to(e.value);
    j.at("actual_length").get_to(e.actual_length);
    j.at("variant").get_to(e.variant);
}

inline void to_json(json& j, const LengthClassReport& r) {
    j = json{{"kind", r.kind},       {"length", r.length},          {"modulus", r.modulus},
             {"classes", r.classes}, {"exceptions", r.exceptions}};
}
inline void from_json(const json& j, LengthClassReport& r) {
    j.at("kind").get_to(r.kind);
    j.at("length").get_to(r.length);
    j.at("modulus").get_to(r.modulus);
    j.at("classes").get_to(r.classes);
    j.at("exceptions").get_to(r.exceptions);
}

inline void to_json(json& j, const FibonacciRow& r) {
    j = json{{"length", r.length},           {"observed", r.observed},        {"expected", r.expected},
             {"match", r.match},             {"brute_checked", r.brute_checked}, {"brute_agree", r.brute_agree}};
}
inline void from_json(const json& j, FibonacciRow& r) {
    j.at("length").get_to(r.length);
    j.at("observed").get_to(r.observed);
    j.at("expected").get_to(r.expected);
    j.at("match").get_to(r.match);
    j.at("brute_checked").get_to(r.brute_checked);
    j.at("brute_agree").get_to(r.brute_agree);
}

inline void to_json(json& j, const StoppingProfile& p) {
    j = json{{"s", p.s},
             {"sigma", p.sigma},
             {"tau", p.tau},
             {"crossing_value", p.crossing_value},
             {"subsequence_starts", p.subsequence_starts}};
}
inline void from_json(const json& j, StoppingProfile& p) {
    j.at("s").get_to(p.s);
    j.at("sigma").get_to(p.sigma);
    j.at("tau").get_to(p.tau);
    j.at("crossing_value").get_to(p.crossing_value);
    j.at("subsequence_starts").get_to(p.subsequence_starts);
}

inline void to_json(json& j, const SigmaDiscrepancy& d) {
    j = json{{"residue", d.residue}, {"representative", d.representative}, {"direct_sigma", d.direct_sigma}};
}
inline void from_json(const json& j, SigmaDiscrepancy& d) {
    j.at("residue").get_to(d.residue);
    j.at("representative").get_to(d.representative);
    j.at("direct_sigma").get_to(d.direct_sigma);
}

inline void to_json(json& j, const SigmaClassReport& r) {
    j = json{{"n", r.n},         {"sigma", r.sigma}, {"modulus", r.modulus}, {"classes", r.classes},
             {"z", r.z()},       {"discrepancies", r.discrepancies}};
}
inline void from_json(const json& j, SigmaClassReport& r) {
    j.at("n").get_to(r.n);
    j.at("sigma").get_to(r.sigma);
    j.at("modulus").get_to(r.modulus);
    j.at("classes").get_to(r.classes);
    j.at("discrepancies").get_to(r.discrepancies);
}

inline void to_json(json& j, const UniformityViolation& v) {
    j = json{{"residue", v.residue},     {"sigma_low", v.sigma_low},   {"tau_low", v.tau_low},
             {"sigma_lift", v.sigma_lift}, {"tau_lift", v.tau_lift}};
}
inline void from_json(const json& j, UniformityViolation& v) {
    j.at("residue").get_to(v.residue);
    j.at("sigma_low").get_to(v.sigma_low);
    j.at("tau_low").get_to(v.tau_low);
    j.at("sigma_lift").get_to(v.sigma_lift);
    j.at("tau_lift").get_to(v.tau_lift);
}

inline void to_json(json& j, const TauClassReport& r) {
    json classes = json::array();
    for (const auto& [t, list] : r.classes) {
        classes.push_back(json{{"tau", t}, {"count", list.size()}, {"residues", list}});
    }
    j = json{{"n", r.n},
             {"sigma", r.sigma},
             {"modulus", r.modulus},
             {"classes", classes},
             {"violations", r.violations}};
}
inline void from_json(const json& j, TauClassReport& r) {
    j.at("n").get_to(r.n);
    j.at("sigma").get_to(r.sigma);
    j.at("modulus").get_to(r.modulus);
    r.classes.clear();
    for (const auto& c : j.at("classes")) {
        c.at("residues").get_to(r.classes[c.at("tau").get<std::uint64_t>()]);
    }
    j.at("violations").get_to(r.violations);
}

inline void to_json(json& j, const CountTable& t) {
    json rows = json::array();
    for (const auto& [key, count] : t.rows) {
        rows.push_back(json{{"tau", key.first}, {"n", key.second}, {"count", count}});
    }
    json z = json::array();
    for (const auto& [n, v] : t.z) {
        z.push_back(json{{"n", n}, {"z", v}, {"sigma", t.sigma_of_n.at(n)}});
    }
    j = json{{"rows", rows}, {"z", z}};
}
inline void from_json(const json& j, CountTable& t) {
    t = CountTable{};
    for (const auto& r : j.at("rows")) {
        t.rows[{r.at("tau").get<std::uint64_t>(), r.at("n").get<std::uint64_t>()}] = r.at("count").get<std::uint64_t>();
    }
    for (const auto& r : j.at("z")) {
        const auto n = r.at("n").get<std::uint64_t>();
        t.z[n] = r.at("z").get<std::uint64_t>();
        t.sigma_of_n[n] = r.at("sigma").get<std::uint64_t>();
    }
}

inline json dyadic_json(const DyadicRational& d) {
    return json{{"numerator", d.numerator()}, {"exponent", d.exponent()}};
}

inline json rational_json(const Rational& q) {
    return json{{"numerator", BigInt(numerator(q))}, {"denominator", BigInt(denominator(q))}};
}

inline void to_json(json& j, const LimitReport& r) {
    json terms = json::array();
    for (const auto& t : r.terms) {
        terms.push_back(json{{"n", t.n}, {"contribution", dyadic_json(t.contribution)}});
    }
    j = json{{"G", r.G},
             {"numerator", dyadic_json(r.numerator)},
             {"denominator", dyadic_json(r.denominator)},
             {"quotient", rational_json(r.quotient)},
             {"decimal", r.decimal},
             {"terms", terms}};
}

// ---- CSV ----

inline std::string csv_classes(const std::vector<ClassBlock>& blocks) {
    std::string out = "header,modulus,residue\n";
    for (const auto& b : blocks) {
        for (auto r : b.residues) {
            out += "\"" + b.header + "\"," + std::to_string(b.modulus) + "," + std::to_string(r) + "\n";
        }
    }
    return out;
}

inline std::string csv_terms(const std::vector<Term>& terms) {
    std::string out = "index,term\n";
    for (std::size_t i = 0; i < terms.size(); ++i) {
        out += std::to_string(i) + "," + terms[i].str() + "\n";
    }
    return out;
}

} // namespace collatz

#include <collatz/collatz.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

namespace {

using namespace collatz;

enum class Format { text, json, csv };

struct Globals {
    Format format = Format::text;
    unsigned threads = 1;
    bool unsafe = false;
    std::uint64_t cap = default_step_cap;

    ScanOptions scan() const {
        ScanOptions o;
        o.threads = threads;
        o.unsafe = unsafe;
        return o;
    }
};

void emit_json(const json& j) { std::cout << j.dump(2) << "\n"; }

std::string block_line(const Subsequence& sub) {
    return std::string(kind_name(sub.kind)) + std::to_string(sub.length_index) + variant_name(sub.variant) + " (" +
           render_terms(sub.terms) + ")";
}

bool stopping_block(const Subsequence& sub) {
    return sub.kind == SubsequenceKind::t_kind && is_stopping_sequence(sub);
}

int cmd_traj(const Globals& g, const std::string& arg) {
    const auto t = trajectory(parse_decimal(arg), stop_at_one, g.cap);
    if (!t.complete) {
        throw CapExhausted("traj: 1 not reached within " + std::to_string(g.cap) + " terms", g.cap);
    }
    switch (g.format) {
    case Format::json:
        emit_json(t);
        break;
    case Format::csv:
        std::cout << csv_terms(t.terms);
        break;
    case Format::text:
        std::cout << render_terms(t.terms) << "\n";
        break;
    }
    return 0;
}

int cmd_decompose(const Globals& g, const std::string& arg, std::size_t max_blocks) {
    const auto d = decompose(parse_decimal(arg), max_blocks, g.cap);
    switch (g.format) {
    case Format::json:
        emit_json(d);
        break;
    case Format::csv:
        std::cout << "index,kind,length,variant,entry_offset,stopping,terms\n";
        for (std::size_t i = 0; i < d.entries.size(); ++i) {
            const auto& e = d.entries[i];
            std::cout << i << "," << kind_name(e.subsequence.kind) << "," << e.subsequence.length_index << ","
                      << variant_name(e.subsequence.variant) << "," << e.entry_offset << ","
                      << (stopping_block(e.subsequence) ? 1 : 0) << ",\"" << render_terms(e.subsequence.terms)
                      << "\"\n";
        }
        break;
    case Format::text:
        if (!d.preamble.empty()) {
            std::cout << "preamble (" << render_terms(d.preamble) << ")\n";
        }
        for (const auto& e : d.entries) {
            std::cout << (stopping_block(e.subsequence) ? "* " : "  ") << block_line(e.subsequence);
            if (e.entry_offset > 0) {
                std::cout << " entered at offset " << e.entry_offset;
            }
            std::cout << "\n";
        }
        if (!d.complete) {
            std::cout << "(incomplete: block limit reached)\n";
        }
        break;
    }
    return 0;
}

int cmd_subseq(const Globals& g, const std::string& arg) {
    const auto sub = extract_subsequence(parse_decimal(arg), g.cap);
    switch (g.format) {
    case Format::json:
        emit_json(sub);
        break;
    case Format::csv:
        std::cout << csv_terms(sub.terms);
        break;
    case Format::text:
        std::cout << block_line(sub) << "\n";
        break;
    }
    return 0;
}

void emit_blocks(const Globals& g, const std::vector<ClassBlock>& blocks) {
    if (g.format == Format::csv) {
        std::cout << csv_classes(blocks);
    } else {
        std::cout << render_blocks(blocks);
    }
}

SubsequenceKind parse_kind(const std::string& k) {
    if (k == "t") {
        return SubsequenceKind::t_kind;
    }
    if (k == "h") {
        return SubsequenceKind::h_kind;
    }
    throw DomainError("--kind must be t or h");
}

int cmd_enum_length(const Globals& g, const std::string& kind, std::size_t len, bool brute) {
    const auto rep = brute ? brute_length_classes(parse_kind(kind), len, g.scan())
                           : symbolic_length_classes(parse_kind(kind), len, g.scan());
    if (g.format == Format::json) {
        emit_json(rep);
        return 0;
    }
    emit_blocks(g, {to_block(rep)});
    if (!rep.exceptions.empty()) {
        std::cerr << "variant-B members below the modulus:";
        for (const auto& e : rep.exceptions) {
            std::cerr << " " << e.value << "(" << e.actual_length << ")";
        }
        std::cerr << "\n";
    }
    return 0;
}

int cmd_sigma(const Globals& g, const std::string& arg) {
    const auto s = parse_decimal(arg);
    const auto k = sigma(s, g.cap);
    switch (g.format) {
    case Format::json:
        emit_json(json{{"s", s}, {"sigma", k}});
        break;
    case Format::csv:
        std::cout << "s,sigma\n" << s << "," << k << "\n";
        break;
    case Format::text:
        std::cout << "sigma=" << k << "\n";
        break;
    }
    return 0;
}

int cmd_tau(const Globals& g, const std::string& arg) {
    const auto p = tau(parse_decimal(arg), g.cap);
    switch (g.format) {
    case Format::json:
        emit_json(p);
        break;
    case Format::csv:
        std::cout << "s,sigma,tau,crossing_value\n"
                  << p.s << "," << p.sigma << "," << p.tau << "," << p.crossing_value << "\n";
        break;
    case Format::text:
        std::cout << "sigma=" << p.sigma << " tau=" << p.tau << " crossing_value=" << p.crossing_value << "\n";
        break;
    }
    return 0;
}

void report_discrepancies(const SigmaClassReport& rep) {
    for (const auto& d : rep.discrepancies) {
        std::cerr << "discrepancy: class " << d.residue << " member " << d.representative << " has direct sigma "
                  << (d.direct_sigma ? std::to_string(*d.direct_sigma) : std::string("> ") +
                                                                             std::to_string(rep.sigma))
                  << "\n";
    }
}

int cmd_enum_sigma(const Globals& g, std::uint64_t n) {
    const auto rep = enum_sigma_classes(n, g.scan());
    if (g.format == Format::json) {
        emit_json(rep);
    } else {
        emit_blocks(g, {to_block(rep)});
    }
    report_discrepancies(rep);
    return 0;
}

int cmd_enum_tau(const Globals& g, std::uint64_t n, std::optional<std::uint64_t> tau_value) {
    const auto rep = enum_tau_classes(n, tau_value, g.scan());
    if (g.format == Format::json) {
        emit_json(rep);
    } else {
        emit_blocks(g, to_blocks(rep));
    }
    for (const auto& v : rep.violations) {
        std::cerr << "uniformity violation at residue " << v.residue << "\n";
    }
    return 0;
}

int cmd_table(const Globals& g, std::uint64_t n_max) {
    const auto t = tau_table(n_max, g.scan());
    switch (g.format) {
    case Format::json:
        emit_json(t);
        break;
    case Format::csv:
        std::cout << "row,n,value\n";
        for (const auto& [n, s] : t.sigma_of_n) {
            std::cout << "sigma," << n << "," << s << "\n";
        }
        for (const auto& [key, c] : t.rows) {
            std::cout << "tau=" << key.first << "," << key.second << "," << c << "\n";
        }
        for (const auto& [n, z] : t.z) {
            std::cout << "z," << n << "," << z << "\n";
        }
        break;
    case Format::text: {
        std::cout << "n";
        for (const auto& [n, s] : t.sigma_of_n) {
            std::cout << "\t" << n;
        }
        std::cout << "\nsigma";
        for (const auto& [n, s] : t.sigma_of_n) {
            std::cout << "\t" << s;
        }
        std::cout << "\n";
        for (std::uint64_t tv = 1; tv <= t.max_tau(); ++tv) {
            std::cout << "tau=" << tv;
            for (const auto& [n, s] : t.sigma_of_n) {
                const auto c = t.at(tv, n);
                std::cout << "\t" << (c == 0 ? std::string("") : std::to_string(c));
            }
            std::cout << "\n";
        }
        std::cout << "z";
        for (const auto& [n, z] : t.z) {
            std::cout << "\t" << z;
        }
        std::cout << "\n";
        break;
    }
    }
    return 0;
}

int cmd_verify_fib(const Globals& g, const std::string& kind, std::size_t max_len) {
    const auto rows = verify_fibonacci_conjectures(parse_kind(kind), max_len, g.scan());
    switch (g.format) {
    case Format::json:
        emit_json(rows);
        break;
    case Format::csv:
        std::cout << "length,observed,expected,match,brute_checked,brute_agree\n";
        for (const auto& r : rows) {
            std::cout << r.length << "," << r.observed << "," << r.expected << "," << r.match << ","
                      << r.brute_checked << "," << r.brute_agree << "\n";
        }
        break;
    case Format::text:
        for (const auto& r : rows) {
            std::cout << kind << "=" << r.length << " observed=" << r.observed << " expected=" << r.expected << " "
                      << (r.match ? "ok" : "MISMATCH");
            if (r.brute_checked) {
                std::cout << " brute=" << (r.brute_agree ? "agree" : "DISAGREE");
            }
            std::cout << "\n";
        }
        break;
    }
    return 0;
}

std::string half(std::uint64_t sum) {
    return std::to_string(sum / 2) + (sum % 2 ? ".5" : "");
}

int cmd_verify_c3(const Globals& g, std::uint64_t n) {
    const auto r = verify_conjecture_3(n, g.scan());
    switch (g.format) {
    case Format::json:
        emit_json(json{{"n", r.n}, {"z", r.z}, {"tau_sum", r.tau_sum}, {"match", r.match}});
        break;
    case Format::csv:
        std::cout << "n,z,tau_sum,match\n" << r.n << "," << r.z << "," << r.tau_sum << "," << r.match << "\n";
        break;
    case Format::text:
        std::cout << "n=" << r.n << " z=" << r.z << " half_sum=" << half(r.tau_sum) << " "
                  << (r.match ? "ok" : "MISMATCH") << "\n";
        break;
    }
    return 0;
}

int cmd_verify_c4(const Globals& g, std::uint64_t n) {
    const auto r = verify_conjecture_4(n, g.scan());
    switch (g.format) {
    case Format::json:
        emit_json(json{{"n", r.n}, {"observed", r.observed}, {"expected", r.expected}, {"m", r.m}, {"match", r.match}});
        break;
    case Format::csv:
        std::cout << "n,observed,expected,m,match\n"
                  << r.n << "," << r.observed << "," << r.expected << "," << r.m << "," << r.match << "\n";
        break;
    case Format::text:
        std::cout << "n=" << r.n << " A_1=" << r.observed << " expected=2^" << r.m << "=" << r.expected << " "
                  << (r.match ? "ok" : "MISMATCH") << "\n";
        break;
    }
    return 0;
}

void emit_limit(const Globals& g, const LimitReport& r) {
    switch (g.format) {
    case Format::json:
        emit_json(r);
        break;
    case Format::csv:
        std::cout << "G,numerator,denominator,decimal\n"
                  << r.G << "," << numerator(r.quotient) << "," << denominator(r.quotient) << "," << r.decimal
                  << "\n";
        break;
    case Format::text:
        std::cout << "G=" << r.G << " quotient=" << r.quotient << " decimal=" << r.decimal << "\n";
        break;
    }
}

int cmd_limits_t6(const Globals& g, std::uint64_t G, const std::string& z_file) {
    std::map<std::uint64_t, std::uint64_t> z;
    if (!z_file.empty()) {
        std::ifstream in(z_file);
        if (!in) {
            throw DomainError("cannot open z-values file '" + z_file + "'");
        }
        z = parse_z_values(in).values;
    } else {
        for (std::uint64_t n = 2; n <= G; ++n) {
            z[n] = enum_sigma_classes(n, g.scan()).z();
        }
    }
    emit_limit(g, theorem6_quotient(G, z));
    return 0;
}

int cmd_profile(const Globals& g, const std::string& arg, std::size_t max_blocks, bool ansi) {
    const auto d = decompose(parse_decimal(arg), max_blocks, g.cap);
    for (const auto& e : d.entries) {
        const bool stop = stopping_block(e.subsequence);
        const std::string glyphs(e.subsequence.terms.size(), 'o');
        if (ansi) {
            std::cout << (stop ? "\x1b[31m" + glyphs + "\x1b[0m" : glyphs) << "\n";
        } else {
            std::cout << (stop ? "* " : "  ") << glyphs << "\n";
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collatz subsequences, stopping times and residue-class enumeration"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    std::map<std::string, Format> formats{{"text", Format::text}, {"json", Format::json}, {"csv", Format::csv}};
    app.add_option("--format", g.format, "Output format")->transform(CLI::CheckedTransformer(formats));
    app.add_option("--threads", g.threads, "Worker threads (0 = hardware)");
    app.add_flag("--unsafe-guard", g.unsafe, "Lift the enumeration size guards");
    app.add_option("--cap", g.cap, "Iteration cap for single trajectories");

    std::string s_arg;
    std::size_t max_blocks = default_max_subsequences;
    std::string kind = "t";
    std::size_t len = 2;
    std::uint64_t n = 2;
    std::uint64_t G = 2;
    std::optional<std::uint64_t> tau_value;
    std::string z_file;
    bool brute = false;
    bool ansi = false;

    int rc = 0;
    std::function<int()> run;

    auto* traj = app.add_subcommand("traj", "Trajectory of s down to 1");
    traj->add_option("s", s_arg)->required();
    traj->callback([&] { run = [&] { return cmd_traj(g, s_arg); }; });

    auto* dec = app.add_subcommand("decompose", "Split a trajectory into its subsequences");
    dec->add_option("s", s_arg)->required();
    dec->add_option("--max", max_blocks, "Maximum number of blocks");
    dec->callback([&] { run = [&] { return cmd_decompose(g, s_arg, max_blocks); }; });

    auto* sub = app.add_subcommand("subseq", "The subsequence starting at s");
    sub->add_option("s", s_arg)->required();
    sub->callback([&] { run = [&] { return cmd_subseq(g, s_arg); }; });

    auto* el = app.add_subcommand("enum-length", "Residue classes of equal subsequence length");
    el->add_option("--kind", kind)->required()->check(CLI::IsMember({"t", "h"}));
    el->add_option("--len", len)->required();
    auto* brute_flag = el->add_flag("--brute", brute, "Brute-force scan");
    auto* sym_flag = el->add_flag("--symbolic", "Parity-tree refinement (default)");
    brute_flag->excludes(sym_flag);
    el->callback([&] { run = [&] { return cmd_enum_length(g, kind, len, brute); }; });

    auto* verify = app.add_subcommand("verify", "Check a conjecture over a range");
    verify->require_subcommand(1);
    auto* vfib = verify->add_subcommand("fib", "Fibonacci class counts");
    vfib->add_option("--kind", kind)->required()->check(CLI::IsMember({"t", "h"}));
    vfib->add_option("--max", len)->required();
    vfib->callback([&] { run = [&] { return cmd_verify_fib(g, kind, len); }; });
    auto* vc3 = verify->add_subcommand("c3", "z(n) against half the tau-class total");
    vc3->add_option("--n", n)->required();
    vc3->callback([&] { run = [&] { return cmd_verify_c3(g, n); }; });
    auto* vc4 = verify->add_subcommand("c4", "A_1(n) against 2^m");
    vc4->add_option("--n", n)->required();
    vc4->callback([&] { run = [&] { return cmd_verify_c4(g, n); }; });

    auto* sg = app.add_subcommand("sigma", "Stopping time of s");
    sg->add_option("s", s_arg)->required();
    sg->callback([&] { run = [&] { return cmd_sigma(g, s_arg); }; });

    auto* tu = app.add_subcommand("tau", "Stopping time and subsequence count of s");
    tu->add_option("s", s_arg)->required();
    tu->callback([&] { run = [&] { return cmd_tau(g, s_arg); }; });

    auto* es = app.add_subcommand("enum-sigma", "Stopping classes mod 2^sigma");
    es->add_option("--n", n)->required();
    es->callback([&] { run = [&] { return cmd_enum_sigma(g, n); }; });

    auto* et = app.add_subcommand("enum-tau", "Stopping classes mod 3*2^sigma grouped by tau");
    et->add_option("--n", n)->required();
    et->add_option("--tau", tau_value);
    et->callback([&] { run = [&] { return cmd_enum_tau(g, n, tau_value); }; });

    auto* tb = app.add_subcommand("table", "A_tau(n) count table");
    tb->add_option("--nmax", n)->required();
    tb->callback([&] { run = [&] { return cmd_table(g, n); }; });

    auto* lim = app.add_subcommand("limits", "Exact limit quotients");
    lim->require_subcommand(1);
    auto* t5 = lim->add_subcommand("t5", "2^(G-1) / sum 2^(G-n-beta_n)");
    t5->add_option("--G", G)->required();
    t5->callback([&] { run = [&] { emit_limit(g, theorem5_quotient(G)); return 0; }; });
    auto* t6 = lim->add_subcommand("t6", "2^(G-1) / sum 2^(G-floor(n log2 3)) z(n)");
    t6->add_option("--G", G)->required();
    t6->add_option("--z-file", z_file, "z-values file (default: enumerate)");
    t6->callback([&] { run = [&] { return cmd_limits_t6(g, G, z_file); }; });

    auto* pr = app.add_subcommand("profile", "One glyph row per subsequence");
    pr->add_option("s", s_arg)->required();
    pr->add_option("--max", max_blocks, "Maximum number of blocks");
    auto* ansi_flag = pr->add_flag("--ansi", ansi, "Colour stopping sequences red");
    auto* plain_flag = pr->add_flag("--plain", "Mark stopping sequences with '*' (default)");
    ansi_flag->excludes(plain_flag);
    pr->callback([&] { run = [&] { return cmd_profile(g, s_arg, max_blocks, ansi); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        rc = run ? run() : 1;
    } catch (const CapExhausted& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const GuardExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cout.flush();
    return rc;
}

#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "catalog.hpp"
#include "data.hpp"
#include "dimension.hpp"
#include "monodromy.hpp"
#include "parallel.hpp"
#include "stabilizer.hpp"
#include "verify.hpp"

namespace plp::cli {

/** Process exit codes. */
enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kIncomplete = 2,
    kDegreeMismatch = 3,
    kIoError = 4,
};

struct RunConfig {
    std::uint64_t seed = 20240601;
    std::vector<std::uint64_t> primes{kDefaultPrime, kSecondPrime};
    int trials = 3;
    TrackOptions track;
    int width = parallel_width();
    std::string out;  // empty: primary output on stdout
    int m_min = 3, m_max = 9;
    std::string data_dir;  // empty: embedded tables

    CertifyOptions certify_options() const {
        CertifyOptions o;
        o.seed = seed;
        o.primes = primes;
        o.trials = trials;
        return o;
    }
    DegreeOptions degree_options() const {
        DegreeOptions o;
        o.track = track;
        o.seed = seed;
        o.width = width;
        return o;
    }
};

struct UsageError : std::invalid_argument {
    explicit UsageError(const std::string& w) : std::invalid_argument(w) {}
};

/** "A..B" or a single "A". */
inline std::pair<int, int> parse_m_range(const std::string& s) {
    const auto dots = s.find("..");
    try {
        std::size_t used = 0;
        if (dots == std::string::npos) {
            const int m = std::stoi(s, &used);
            if (used != s.size()) throw UsageError("bad m range: " + s);
            return {m, m};
        }
        const std::string a = s.substr(0, dots), b = s.substr(dots + 2);
        const int lo = std::stoi(a, &used);
        if (used != a.size()) throw UsageError("bad m range: " + s);
        const int hi = std::stoi(b, &used);
        if (used != b.size()) throw UsageError("bad m range: " + s);
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw UsageError("bad m range: " + s);
    }
}

/** "m,pf,pd,lf,la". */
inline PlpSignature parse_signature(const std::string& s) {
    std::vector<int> v;
    std::stringstream ss(s);
    std::string tok;
    try {
        while (std::getline(ss, tok, ',')) v.push_back(std::stoi(tok));
    } catch (const std::logic_error&) {
        throw UsageError("bad signature: " + s);
    }
    if (v.size() != 5) throw UsageError("signature needs five comma-separated integers: " + s);
    return {v[0], v[1], v[2], v[3], v[4]};
}

/** Primary output goes to `path` when set, otherwise to `fallback`. */
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (path.empty()) return;
        file_.open(path, std::ios::binary | std::ios::trunc);
        if (!file_) throw DataIoError("cannot open " + path + " for writing");
        os_ = &file_;
    }
    std::ostream& stream() { return *os_; }
    bool to_file() const { return file_.is_open(); }
    void close() {
        if (!file_.is_open()) return;
        file_.close();
        if (!file_) throw DataIoError("write failed");
    }

private:
    std::ofstream file_;
    std::ostream* os_;
};

inline DataSources data_for(const RunConfig& cfg) {
    return cfg.data_dir.empty() ? embedded_data() : load_data_dir(cfg.data_dir);
}

// ---------------------------------------------------------------------------
// enumerate
// ---------------------------------------------------------------------------

/**
 * Writes the balanced classes as CSV and prints the count.  The summary goes
 * to `out` when the CSV goes to a file and to `err` otherwise.
 */
inline int cmd_enumerate(const RunConfig& cfg, bool single_view, std::ostream& out, std::ostream& err) {
    Sink sink(cfg.out, out);
    std::ostream& summary = sink.to_file() ? out : err;
    if (single_view) {
        const auto sigs = single_view_balanced();
        const auto probs = single_view_problems();
        write_csv(sink.stream(), sigs);
        sink.close();
        summary << sigs.size() << " signatures / " << probs.size() << " problems\n";
        for (const auto& p : probs) summary << "  " << signature_of(p).str() << ' ' << to_json(p).dump() << '\n';
        return kOk;
    }
    if (cfg.m_min < 2 || cfg.m_min > cfg.m_max) throw UsageError("m range must satisfy 2 <= A <= B");
    const auto en = enumerate_balanced(cfg.m_min, cfg.m_max);
    write_csv(sink.stream(), en.signatures);
    sink.close();
    summary << en.signatures.size() << (en.signatures.size() == 1 ? " class\n" : " classes\n");
    for (const auto& f : en.families) {
        summary << "  family " << f.name << ": m " << f.m_min << "..";
        if (f.m_max < 0) summary << "any";
        else summary << f.m_max;
        if (f.any_lines) summary << ", 7 points, any lines\n";
        else summary << ", (" << f.pf << ',' << f.pd << ',' << f.lf << ',' << f.la << ")\n";
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

inline const char* verdict_bucket(const Certificate& c) {
    if (c.verdict == Verdict::Minimal) return "minimal";
    if (c.verdict == Verdict::Undetermined) return "undetermined";
    return c.evidence_kind == "criterion" ? "criteria" : "ledger";
}

/**
 * Classifies every candidate (or those of one signature), writes one atlas
 * line per candidate and prints the split.  Undetermined candidates are
 * listed and make the exit code nonzero.
 */
inline int cmd_classify(const RunConfig& cfg, const std::optional<PlpSignature>& only, std::ostream& out,
                        std::ostream& err) {
    const auto data = data_for(cfg);
    const Obstructions ob(data);
    const ExpectedTable expected(data);
    std::vector<PlpInstance> cands;
    if (only) {
        if (!is_balanced(*only)) throw UsageError("signature " + only->str() + " is not balanced");
        cands = expand_candidates(*only);
    } else {
        cands = all_candidates();
    }
    const auto opt = cfg.certify_options();
    std::vector<Certificate> certs(cands.size());
    parallel_for(cands.size(), [&](std::size_t i) { certs[i] = classify(cands[i], opt, ob); }, cfg.width);

    Sink sink(cfg.out, out);
    std::ostream& summary = sink.to_file() ? out : err;
    int minimal = 0, criteria = 0, ledger = 0, undetermined = 0, disagree = 0;
    std::vector<std::string> open;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        const auto& c = certs[i];
        json line = atlas_entry(cands[i]);
        const auto* r = expected.find(canonical_key(cands[i]));
        line["expected"] = r ? to_json(*r) : json(nullptr);
        line["certificate"] = to_json(c);
        line["class"] = verdict_bucket(c);
        sink.stream() << line.dump() << '\n';
        const std::string b = verdict_bucket(c);
        if (b == "minimal") ++minimal;
        else if (b == "criteria") ++criteria;
        else if (b == "ledger") ++ledger;
        else ++undetermined, open.push_back(signature_of(cands[i]).str() + " " + c.key + " rank " + std::to_string(c.rank) + "/" + std::to_string(c.dim));
        const bool agrees = r && ((r->verdict == ExpectedVerdict::Minimal && b == "minimal") ||
                                  (r->verdict == ExpectedVerdict::NonMinimalByCriteria && b == "criteria") ||
                                  (r->verdict == ExpectedVerdict::NonMinimalByElimination && b == "ledger"));
        if (!agrees) ++disagree;
    }
    sink.close();
    summary << cands.size() << " = " << minimal << " minimal + " << criteria << " criteria + " << ledger << " ledger";
    if (undetermined) summary << " + " << undetermined << " undetermined";
    summary << '\n';
    if (only && cands.size() == 1 && certs[0].verdict == Verdict::NonMinimal)
        summary << "  " << signature_of(cands[0]).str() << ": non-minimal, " << certs[0].evidence_kind << ' '
                << certs[0].evidence << '\n';
    if (disagree) summary << "  " << disagree << " verdicts differ from the expected table\n";
    for (const auto& s : open) summary << "  undetermined " << s << '\n';
    return undetermined ? kIncomplete : kOk;
}

// ---------------------------------------------------------------------------
// degree
// ---------------------------------------------------------------------------

struct DegreeSelector {
    std::string preset;  // table1, desk, small or extended
    std::string key;     // hex canonical key
    int seeds = 3;
};

struct DegreeTarget {
    std::string label;
    PlpInstance instance;
    std::optional<int> expected;
};

/** Instances named by a preset or a key; throws UsageError when nothing resolves. */
inline std::vector<DegreeTarget> resolve_degree_targets(const DegreeSelector& sel, const ExpectedTable& table) {
    std::vector<DegreeTarget> out;
    const auto expected_of = [&](const PlpInstance& inst) -> std::optional<int> {
        const auto* r = table.find(canonical_key(inst));
        return r ? r->degree : std::nullopt;
    };
    if (!sel.key.empty()) {
        const auto* r = table.find_hex(sel.key);
        if (!r) throw UsageError("no record with key " + sel.key);
        if (r->verdict != ExpectedVerdict::Minimal) throw UsageError("key " + sel.key + " is not a minimal problem");
        if (r->instance.m < 2) throw UsageError("key " + sel.key + " is a single-view problem");
        out.push_back({signature_of(r->instance).str(), r->instance, r->degree});
        return out;
    }
    if (sel.preset == "table1" || sel.preset == "desk") {
        auto cases = desk_degree_cases();
        if (sel.preset == "table1") cases.resize(6);
        for (auto& c : cases) out.push_back({c.label, c.instance, expected_of(c.instance)});
        return out;
    }
    if (sel.preset == "small" || sel.preset == "extended") {
        for (const auto& r : table.records()) {
            if (r.verdict != ExpectedVerdict::Minimal || !r.degree || r.instance.m < 2) continue;
            const int D = budget(signature_of(r.instance)).dimDomain;
            const bool small = *r.degree <= 10 && D <= 60;
            const bool extended = *r.degree > 40 || D > 80;
            if ((sel.preset == "small" && small) || (sel.preset == "extended" && extended))
                out.push_back({signature_of(r.instance).str(), r.instance, r.degree});
        }
        return out;
    }
    throw UsageError("unknown preset " + sel.preset + " (table1, desk, small, extended)");
}

/**
 * Runs monodromy on each target for `seeds` consecutive seeds, writes one
 * report line per target and compares with the expected degree.
 */
inline int cmd_degree(const RunConfig& cfg, const DegreeSelector& sel, std::ostream& out, std::ostream& err) {
    const auto data = data_for(cfg);
    const ExpectedTable table(data);
    const auto targets = resolve_degree_targets(sel, table);
    if (sel.seeds < 1) throw UsageError("--seeds must be positive");
    std::vector<std::uint64_t> seeds;
    for (int k = 0; k < sel.seeds; ++k) seeds.push_back(cfg.seed + static_cast<std::uint64_t>(k));

    Sink sink(cfg.out, out);
    std::ostream& summary = sink.to_file() ? out : err;
    int matched = 0, mismatched = 0, unknown = 0;
    for (const auto& t : targets) {
        std::vector<int> counts;
        DegreeEstimate best;
        for (auto s : seeds) {
            auto o = cfg.degree_options();
            o.seed = s;
            DegreeEstimate d;
            try {
                d = degree(t.instance, o);
            } catch (const MonodromyAbort&) {
                d.key = canonical_key(t.instance).hex();
                d.degree = -1;
            }
            counts.push_back(d.degree);
            if (counts.size() == 1 || d.degree > best.degree) best = std::move(d);
        }
        best.seeds_agreeing = static_cast<int>(std::count(counts.begin(), counts.end(), best.degree));
        json line = to_json(best);
        line["signature"] = signature_json(signature_of(t.instance));
        line["label"] = t.label;
        line["counts"] = counts;
        line["expected"] = t.expected ? json(*t.expected) : json(nullptr);
        const bool all_agree = best.seeds_agreeing == static_cast<int>(seeds.size());
        if (!t.expected) {
            ++unknown;
            line["match"] = nullptr;
        } else {
            const bool ok = all_agree && best.degree == *t.expected;
            line["match"] = ok;
            ok ? ++matched : ++mismatched;
        }
        sink.stream() << line.dump() << '\n';
        sink.stream().flush();
        summary << "  " << t.label << ": " << best.degree;
        if (t.expected) summary << " (expected " << *t.expected << ")";
        summary << ", seeds agreeing " << best.seeds_agreeing << "/" << seeds.size() << '\n';
    }
    sink.close();
    summary << matched << " of " << targets.size() << " degrees match";
    if (mismatched) summary << ", " << mismatched << " mismatch";
    if (unknown) summary << ", " << unknown << " without a recorded degree";
    summary << '\n';
    return mismatched ? kDegreeMismatch : kOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

/** Exit code for a report: degree-only failures give kDegreeMismatch, anything else kIncomplete. */
inline int verify_exit_code(const VerifyReport& rep) {
    const auto f = rep.failures();
    if (f.empty()) return kOk;
    const bool only_degrees = std::all_of(f.begin(), f.end(), [](const CheckResult* c) { return c->name.rfind("degrees", 0) == 0; });
    return only_degrees ? kDegreeMismatch : kIncomplete;
}

/** Runs the acceptance suite, printing one line per check and writing a JSON report to `out` if set. */
inline int cmd_verify(const RunConfig& cfg, bool fast, bool stretch, std::ostream& out) {
    const auto data = data_for(cfg);
    VerifyOptions vo;
    vo.fast = fast;
    vo.stretch = stretch;
    vo.certify = cfg.certify_options();
    vo.degree = cfg.degree_options();
    vo.on_result = [&](const CheckResult& c) { out << c.line() << std::endl; };
    const auto rep = run_acceptance(data, vo);
    if (!cfg.out.empty()) {
        Sink sink(cfg.out, out);
        sink.stream() << to_json(rep).dump(2) << '\n';
        sink.close();
    }
    out << (rep.passed() ? "acceptance passed" : "acceptance FAILED") << '\n';
    return verify_exit_code(rep);
}

}  // namespace plp::cli

#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "data.hpp"
#include "dimension.hpp"
#include "incidence.hpp"

namespace plp {

/** Point structure of a candidate, with the sites where adjacent lines may attach. */
struct ArrangementTemplate {
    std::string name;
    int pf = 0, pd = 0;
    std::vector<PointTag> points;
    std::vector<std::array<int, 3>> collinear;  // dependent point with its parents
    std::vector<int> sites;                     // admissible attachment points

    static ArrangementTemplate make(std::string name, int pf, std::vector<std::pair<int, int>> deps) {
        ArrangementTemplate t;
        t.name = std::move(name);
        t.pf = pf;
        t.pd = static_cast<int>(deps.size());
        for (int i = 0; i < pf; ++i) t.points.push_back(PointTag::free());
        for (auto [a, b] : deps) {
            t.collinear.push_back({a, b, static_cast<int>(t.points.size())});
            t.points.push_back(PointTag::dep(a, b));
        }
        for (int i = 0; i < pf + t.pd; ++i) t.sites.push_back(i);
        return t;
    }
};

/**
 * All point arrangements with the given counts that can occur in a minimal
 * problem.  Four or more collinear points and planes holding three free and
 * three or more dependent points are excluded, which empties (2, >=2),
 * (3, >=3) and every count with more than 7 points.
 */
inline std::vector<ArrangementTemplate> point_arrangements(int pf, int pd) {
    using A = ArrangementTemplate;
    std::vector<A> out;
    const int key = pf * 10 + pd;
    switch (key) {
    case 0: out.push_back(A::make("empty", 0, {})); break;
    case 10: out.push_back(A::make("one point", 1, {})); break;
    case 20: out.push_back(A::make("two points", 2, {})); break;
    case 21: out.push_back(A::make("collinear triple", 2, {{0, 1}})); break;
    case 30: out.push_back(A::make("three points", 3, {})); break;
    case 31: out.push_back(A::make("triple and a point", 3, {{0, 1}})); break;
    case 32: out.push_back(A::make("two triples sharing a point", 3, {{0, 1}, {1, 2}})); break;
    case 40: out.push_back(A::make("four points", 4, {})); break;
    case 41: out.push_back(A::make("triple and two points", 4, {{0, 1}})); break;
    case 42:
        out.push_back(A::make("two disjoint triples", 4, {{0, 1}, {2, 3}}));
        out.push_back(A::make("two triples sharing a point", 4, {{0, 1}, {1, 2}}));
        break;
    case 50: out.push_back(A::make("five points", 5, {})); break;
    case 51: out.push_back(A::make("triple and three points", 5, {{0, 1}})); break;
    case 60: out.push_back(A::make("six points", 6, {})); break;
    case 70: out.push_back(A::make("seven points", 7, {})); break;
    case 61: out.push_back(A::make("triple and four points", 6, {{0, 1}})); break;
    case 52:
        out.push_back(A::make("two disjoint triples", 5, {{0, 1}, {2, 3}}));
        out.push_back(A::make("two triples sharing a point", 5, {{0, 1}, {1, 2}}));
        break;
    case 43:
        out.push_back(A::make("chain of three triples", 4, {{0, 1}, {1, 2}, {2, 3}}));
        out.push_back(A::make("three triples through one point", 4, {{0, 1}, {0, 2}, {0, 3}}));
        break;
    default: break;
    }
    return out;
}

/** Multisets of size k drawn from sites, in lexicographic order. */
inline void for_each_multiset(const std::vector<int>& sites, int k, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> cur;
    std::function<void(std::size_t, int)> rec = [&](std::size_t from, int left) {
        if (left == 0) {
            fn(cur);
            return;
        }
        for (std::size_t i = from; i < sites.size(); ++i) {
            cur.push_back(sites[i]);
            rec(i, left - 1);
            cur.pop_back();
        }
    };
    rec(0, k);
}

/**
 * Non-equivalent instances of a finite balanced signature: every point
 * arrangement with every attachment multiset of the adjacent lines, deduplicated
 * by canonical key in first-seen order.
 */
inline std::vector<PlpInstance> expand_candidates(const PlpSignature& sig) {
    std::vector<PlpInstance> out;
    std::set<std::string> seen;
    for (const auto& arr : point_arrangements(sig.pf, sig.pd)) {
        if (arr.points.empty() && sig.la > 0) continue;
        for_each_multiset(arr.sites, sig.la, [&](const std::vector<int>& att) {
            PlpInstance inst = make_instance(sig.m, arr.points, sig.lf, att);
            if (seen.insert(canonical_key(inst).text).second) out.push_back(std::move(inst));
        });
    }
    return out;
}

/** Expansion of every finite class for m in [3, 9]. */
inline std::vector<PlpInstance> all_candidates() {
    std::vector<PlpInstance> out;
    for (const auto& s : enumerate_balanced(3, 9).signatures) {
        auto v = expand_candidates(s);
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

/** The 8 single-view problems: single-view signatures expanded over attachments. */
inline std::vector<PlpInstance> single_view_problems() {
    std::vector<PlpInstance> out;
    for (const auto& s : single_view_balanced()) {
        std::set<std::string> seen;
        for (const auto& arr : point_arrangements(s.pf, 0)) {
            if (arr.points.empty() && s.la > 0) continue;
            for_each_multiset(arr.sites, s.la, [&](const std::vector<int>& att) {
                PlpInstance inst = make_instance(1, arr.points, s.lf, att);
                if (seen.insert(canonical_key(inst).text).second) out.push_back(std::move(inst));
            });
        }
    }
    return out;
}

/** The two-view arrangements of seven points without lines. */
inline std::vector<PlpInstance> two_view_arrangements() {
    std::vector<PlpInstance> out;
    for (auto [pf, pd] : {std::pair{7, 0}, {6, 1}, {5, 2}, {4, 3}})
        for (const auto& arr : point_arrangements(pf, pd)) out.push_back(make_instance(2, arr.points, 0, {}));
    return out;
}

// ---------------------------------------------------------------------------
// Expected records
// ---------------------------------------------------------------------------

enum class ExpectedVerdict { Minimal, NonMinimalByCriteria, NonMinimalByElimination };

inline const char* to_string(ExpectedVerdict v) {
    switch (v) {
    case ExpectedVerdict::Minimal: return "minimal";
    case ExpectedVerdict::NonMinimalByCriteria: return "non-minimal-by-criteria";
    case ExpectedVerdict::NonMinimalByElimination: return "non-minimal-by-elimination";
    }
    return "?";
}

struct ExpectedRecord {
    CanonicalLabel key;
    PlpInstance instance;
    ExpectedVerdict verdict = ExpectedVerdict::Minimal;
    std::optional<int> degree;
};

/**
 * Reference table: minimal problems with degrees, the elimination ledger
 * problems, and every remaining candidate as non-minimal by criteria.
 */
class ExpectedTable {
public:
    explicit ExpectedTable(const DataSources& src) {
        const json recs = json::parse(src.expected_records);
        for (const auto& r : recs.at("records")) {
            ExpectedRecord e;
            e.instance = instance_from_json(r.at("instance"));
            e.key = canonical_key(e.instance);
            e.verdict = ExpectedVerdict::Minimal;
            if (r.contains("degree")) e.degree = r.at("degree").get<int>();
            add(std::move(e));
        }
        const json led = json::parse(src.ledger);
        for (const auto& r : led.at("entries")) {
            ExpectedRecord e;
            e.instance = instance_from_json(r.at("instance"));
            e.key = canonical_key(e.instance);
            e.verdict = ExpectedVerdict::NonMinimalByElimination;
            add(std::move(e));
        }
        for (auto& inst : all_candidates()) {
            ExpectedRecord e;
            e.key = canonical_key(inst);
            if (index_.count(e.key.text)) continue;
            e.instance = std::move(inst);
            e.verdict = ExpectedVerdict::NonMinimalByCriteria;
            add(std::move(e));
        }
    }

    const std::vector<ExpectedRecord>& records() const { return records_; }

    const ExpectedRecord* find(const CanonicalLabel& key) const {
        auto it = index_.find(key.text);
        return it == index_.end() ? nullptr : &records_[it->second];
    }
    const ExpectedRecord* find_hex(const std::string& hex) const {
        for (const auto& r : records_)
            if (r.key.hex() == hex) return &r;
        return nullptr;
    }

private:
    void add(ExpectedRecord e) {
        if (index_.count(e.key.text)) throw std::runtime_error("duplicate expected record " + e.key.hex());
        index_[e.key.text] = records_.size();
        records_.push_back(std::move(e));
    }
    std::vector<ExpectedRecord> records_;
    std::map<std::string, std::size_t> index_;
};

inline const ExpectedTable& default_expected_table() {
    static const ExpectedTable table(embedded_data());
    return table;
}

inline std::optional<ExpectedRecord> expected_record(const PlpInstance& inst) {
    const auto* r = default_expected_table().find(canonical_key(inst));
    if (!r) return std::nullopt;
    return *r;
}

inline json to_json(const ExpectedRecord& r) {
    json j;
    j["key"] = r.key.hex();
    j["verdict"] = to_string(r.verdict);
    if (r.degree) j["degree"] = *r.degree;
    else j["degree"] = nullptr;
    return j;
}

inline json signature_json(const PlpSignature& s) { return json::array({s.m, s.pf, s.pd, s.lf, s.la}); }

/** One atlas line: instance, signature, key and expected record if any. */
inline json atlas_entry(const PlpInstance& inst) {
    json j;
    j["instance"] = to_json(inst);
    j["signature"] = signature_json(signature_of(inst));
    const auto key = canonical_key(inst);
    j["key"] = key.hex();
    const auto* r = default_expected_table().find(key);
    j["expected"] = r ? to_json(*r) : json(nullptr);
    return j;
}

}  // namespace plp

#include "collatzlab/certificate_json.hpp"

namespace collatzlab {

using nlohmann::json;

json to_json(const BigInt& v) {
    if (v.fits_slong_p()) return static_cast<std::int64_t>(v.get_si());
    return v.get_str();
}

json to_json(const AffineValue& v) { return json{{"a", to_json(v.a)}, {"b", to_json(v.b)}}; }

namespace {

json to_json(const std::vector<Substitution>& subs) {
    json out = json::array();
    for (const auto& s : subs) out.push_back({{"residue", s.residue}, {"modulus", s.modulus}});
    return out;
}

} // namespace

json to_json(const CertificateNode& node) {
    json j;
    j["value"] = to_json(node.value);
    j["applied"] = to_string(node.applied);
    j["outcome"] = to_string(node.outcome);
    j["depth"] = node.depth;
    j["substitutions"] = to_json(node.substitutions);
    if (!node.live_residues.empty()) {
        j["split"] = {{"modulus", 3}, {"live", node.live_residues}, {"dead", node.dead_residues}};
    }
    if (!node.exceptional_l.empty()) {
        json ex = json::array();
        for (const auto& l : node.exceptional_l) ex.push_back(to_json(l));
        j["exceptional_l"] = ex;
    }
    if (!node.rejected.empty()) {
        json rej = json::array();
        for (const auto& r : node.rejected) {
            if (r.applied == Applied::Tri) {
                rej.push_back({{"applied", "tri"}, {"numerator", to_json(r.value)}, {"denominator", 3}});
            } else {
                rej.push_back({{"applied", to_string(r.applied)}, {"value", to_json(r.value)}});
            }
        }
        j["rejected"] = rej;
    }
    json kids = json::array();
    for (const auto& c : node.children) kids.push_back(to_json(c));
    j["children"] = kids;
    return j;
}

json to_json(const Certificate& cert) {
    json j;
    j["family"] = {{"a", to_json(cert.a0)}, {"m", to_json(cert.m0)}};
    j["config"] = {{"max_depth", cert.config.max_depth},
                   {"max_modulus", cert.config.max_modulus},
                   {"l_min", to_json(cert.config.l_min)}};
    j["nodes"] = to_json(cert.root);
    json summary = json::array();
    for (const auto& c : cert.summary) {
        json s;
        s["class_description"] = c.description(cert.config.l_min);
        s["status"] = to_string(c.status);
        s["reason"] = c.reason;
        s["substitutions"] = to_json(c.substitutions);
        s["k"] = to_json(c.k);
        s["param_min"] = to_json(c.param_min);
        if (!c.concrete.empty()) {
            json cc = json::array();
            for (const auto& chk : c.concrete) {
                cc.push_back({{"l", to_json(chk.l)}, {"k", chk.k}, {"status", to_string(chk.status)}});
            }
            s["concrete_checks"] = cc;
        }
        summary.push_back(s);
    }
    j["summary"] = summary;
    return j;
}

std::string canonical_json(const Certificate& cert) { return to_json(cert).dump(2) + "\n"; }

} // namespace collatzlab

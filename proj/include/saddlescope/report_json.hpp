#pragma once

#include <json.hpp>

#include "saddlescope/elliptic_lift.hpp"
#include "saddlescope/entropy.hpp"
#include "saddlescope/fixed_points.hpp"
#include "saddlescope/homoclinic.hpp"
#include "saddlescope/kernels.hpp"

namespace saddlescope {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline Json to_json(const TorusPoint& p) { return Json::array({p.x, p.y}); }

inline Json to_json(const FixedPointRecord& r) {
    Json j;
    j["location"] = to_json(r.location);
    j["translation"] = Json::array({r.translate_x, r.translate_y});
    j["classification"] = classification_name(r.classification);
    j["eigenvalues"] = Json::array({Json::array({r.eigenvalue_1.real(), r.eigenvalue_1.imag()}),
                                    Json::array({r.eigenvalue_2.real(), r.eigenvalue_2.imag()})});
    if (r.is_saddle()) {
        j["unstable_direction"] = Json::array({r.unstable_direction.x, r.unstable_direction.y});
        j["stable_direction"] = Json::array({r.stable_direction.x, r.stable_direction.y});
    }
    j["residual"] = r.residual;
    return j;
}

inline Json to_json(const IntersectionRecord& r) {
    Json j;
    j["branches"] = Json::array({branch_name(r.unstable_branch), branch_name(r.stable_branch)});
    j["point"] = to_json(r.point);
    j["refined_point"] = to_json(r.refined_point);
    j["params"] = Json::array({r.t_u, r.t_s});
    j["verdict"] = r.verdict == Verdict::TopologicallyTransverse ? "TopologicallyTransverse"
                                                                 : "TangentialOrUnresolved";
    j["refinement_depth"] = r.refinement_depth;
    j["side_signature"] = r.side_signature;
    return j;
}

inline Json to_json(const EntropyReport& r) {
    Json j;
    j["method"] = r.method == EntropyMethod::LengthGrowth ? "LengthGrowth" : "HorseshoeShift";
    j["bound_nats"] = r.bound;
    j["found"] = r.found;
    if (r.method == EntropyMethod::HorseshoeShift) j["n"] = r.n;
    if (r.budget_exceeded) j["budget_exceeded"] = true;
    if (!r.fit.empty()) {
        Json fit = Json::array();
        for (const auto& [it, v] : r.fit) fit.push_back(Json::array({it, v}));
        j["fit"] = fit;
    }
    return j;
}

inline Json to_json(const OmegaDecomposition& o) {
    Json j;
    j["q"] = to_json(o.q);
    j["grid_res"] = o.grid_res;
    j["component_count"] = o.labeling.component_count;
    j["resolved_component_count"] = o.labeling.resolved_count;
    j["a_component"] = o.a_component;
    j["all_components_touch_both"] = o.all_components_touch_both;
    Json touches = Json::array();
    for (std::size_t c = 0; c < o.labeling.touches.size(); ++c) {
        if (!o.labeling.resolved[c]) continue;
        auto t = o.labeling.touches[c];
        touches.push_back(Json::array({bool(t & 1), bool(t & 2)}));
    }
    j["component_touches_us"] = touches;
    return j;
}

inline Json to_json(const ArcTrapReport& r) {
    Json j;
    j["alpha"] = r.alpha;
    j["n"] = r.n;
    j["r0"] = r.r0;
    j["epsilon"] = r.epsilon;
    j["conditions_ok"] = r.conditions_ok;
    j["consecutive_overlap"] = r.consecutive_overlap;
    j["k"] = r.k;
    j["closed"] = r.closed;
    j["winding"] = r.winding;
    j["xi_vertices"] = r.xi.size();
    return j;
}

inline Json make_report(Json data, Json config) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    Json meta;
    meta["kernel"] = active_kernels().name;
    meta["config"] = std::move(config);
    j["meta"] = std::move(meta);
    j["data"] = std::move(data);
    return j;
}

}  // namespace saddlescope

// saddlescope: command-line front end for the standard-map toolkit.
// Subcommands cover fixed points, homoclinic detection, entropy bounds,
// combinatorial end counting, the elliptic polar lift, and parameter sweeps.

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "saddlescope/ideal_ends.hpp"
#include "saddlescope/report_json.hpp"

namespace fs = std::filesystem;
using namespace saddlescope;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInternal = 3;
constexpr int kExitExcludedParameter = 4;

struct CliError {
    int code;
    std::string message;
};

void write_json(const Json& j, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream os(path);
    if (!os) throw CliError{kExitConfig, "cannot open output file " + path};
    os << j.dump(2) << '\n';
}

MapSpec make_map(const std::string& name, double mu, int steps) {
    if (name == "standard") return MapSpec::standard(mu);
    if (name == "cat") return MapSpec::linear_torus(2, 1, 1, 1);
    if (name == "hamiltonian") return MapSpec::hamiltonian(steps);
    throw CliError{kExitConfig, "unknown map '" + name + "'"};
}

FixedPointRecord principal_saddle(const MapSpec& map) {
    for (const auto& rec : find_fixed_points(map, 16)) {
        if (rec.classification == Classification::SaddlePositive) return rec;
    }
    throw CliError{kExitInternal, "no positive saddle found"};
}

Branch parse_branch(const std::string& tag) {
    if (tag == "UPlus") return Branch::UnstablePlus;
    if (tag == "UMinus") return Branch::UnstableMinus;
    if (tag == "SPlus") return Branch::StablePlus;
    if (tag == "SMinus") return Branch::StableMinus;
    throw CliError{kExitConfig, "unknown branch tag '" + tag + "'"};
}

int cmd_fixed_points(double mu, const std::string& map_name, int steps, int resolution,
                     const std::string& json_out, std::uint64_t seed) {
    MapSpec map = make_map(map_name, mu, steps);
    if (map.kind == MapKind::StandardMap && mu == 4.0) {
        std::cerr << "warning: mu = 4 is the excluded parameter; q = (1/2, 0) is degenerate\n";
    }
    Json data;
    data["map"] = map.name();
    data["method"] = "grid-seeded damped Newton on the lift (heuristic seed coverage)";
    if (map.kind == MapKind::HamiltonianTimeOne) {
        double drift = 0.0;
        for (int i = 0; i < 128; ++i) {
            TorusPoint p{hash_unit(2 * i), hash_unit(2 * i + 1)};
            drift = std::max(drift, std::abs(jacobian(map, p).det() - 1.0));
        }
        data["integrator"] = Json{{"scheme", "implicit_midpoint"},
                                  {"substeps", map.step_count},
                                  {"jacobian", "variational"},
                                  {"measured_det_drift", drift}};
    }
    Json records = Json::array();
    if (map.kind == MapKind::StandardMap && mu == 0.0) {
        std::cerr << "warning: mu = 0 is a trivial twist; the fixed circle y = 0 is "
                     "suppressed\n";
    } else {
        for (const auto& rec : find_fixed_points(map, resolution)) {
            records.push_back(to_json(rec));
        }
    }
    data["fixed_points"] = records;
    Json config{{"command", "fixed-points"}, {"mu", mu},      {"map", map_name},
                {"resolution", resolution},  {"seed", seed}};
    write_json(make_report(data, config), json_out);
    return 0;
}

int cmd_homoclinic(double mu, const std::string& pairs_arg, double length, double tmax,
                   double window, const std::string& json_out, const std::string& csv_dir,
                   const std::string& pgm_out, std::uint64_t seed) {
    if (mu == 4.0) {
        std::cerr << "error: mu = 4 is the excluded parameter; the principal analysis "
                     "assumes a nondegenerate q\n";
        return kExitExcludedParameter;
    }
    MapSpec map = MapSpec::standard(mu);
    FixedPointRecord p = principal_saddle(map);

    std::vector<std::pair<Branch, Branch>> pairs;
    if (pairs_arg == "all") {
        pairs = {{Branch::UnstablePlus, Branch::StablePlus},
                 {Branch::UnstablePlus, Branch::StableMinus},
                 {Branch::UnstableMinus, Branch::StablePlus},
                 {Branch::UnstableMinus, Branch::StableMinus}};
    } else {
        for (std::size_t pos = 0; pos < pairs_arg.size();) {
            std::size_t comma = pairs_arg.find(',', pos);
            std::string item = pairs_arg.substr(pos, comma - pos);
            std::size_t dash = item.find('-');
            if (dash == std::string::npos) {
                throw CliError{kExitConfig, "pair syntax is UPlus-SPlus[,...]"};
            }
            pairs.push_back(
                {parse_branch(item.substr(0, dash)), parse_branch(item.substr(dash + 1))});
            pos = comma == std::string::npos ? pairs_arg.size() : comma + 1;
        }
    }

    BranchSet set = grow_branch_set(map, p, length);
    if (tmax > 0.0) {
        for (Branch b : {Branch::UnstablePlus, Branch::UnstableMinus, Branch::StablePlus,
                         Branch::StableMinus}) {
            grow(set.get(b), tmax);
        }
    }
    Json data;
    data["map"] = map.name();
    data["saddle"] = to_json(p);
    Json pair_reports = Json::array();
    std::optional<IntersectionRecord> omega_rec;

    for (auto [ub, sb] : pairs) {
        PairScan scan;
        for (int attempt = 0; attempt < 3; ++attempt) {
            scan = scan_pair(set.get(ub), set.get(sb), 64, window);
            if (scan.first_transverse) break;
            grow_to_length(set.get(ub), set.get(ub).torus_length * 2.0);
            grow_to_length(set.get(sb), set.get(sb).torus_length * 2.0);
        }
        Json pj;
        pj["pair"] = Json::array({branch_name(ub), branch_name(sb)});
        pj["record_count"] = scan.records.size();
        Json recs = Json::array();
        std::size_t cap = std::min<std::size_t>(scan.records.size(), 128);
        for (std::size_t i = 0; i < cap; ++i) recs.push_back(to_json(scan.records[i]));
        pj["records"] = recs;
        pj["transverse_found"] = scan.first_transverse.has_value();
        if (scan.first_transverse) {
            pj["first_transverse"] = to_json(*scan.first_transverse);
            if (!omega_rec) omega_rec = scan.first_transverse;
        }
        pair_reports.push_back(pj);

        if (!scan.first_transverse && omega_rec == std::nullopt) {
            std::cerr << "warning: no transverse record for pair " << branch_name(ub) << "-"
                      << branch_name(sb) << " at this growth budget\n";
        }
    }
    data["pairs"] = pair_reports;

    {
        ConnectionReport probe =
            connection_probe(set.get(pairs[0].first), set.get(pairs[0].second), 1e-3);
        data["connection_probe"] =
            Json{{"tol", probe.tol},
                 {"defect_stages", Json::array({probe.defect[0], probe.defect[1],
                                                probe.defect[2]})},
                 {"connection_suspected", probe.connection_suspected}};
    }

    if (omega_rec) {
        ManifoldArc& u = set.get(omega_rec->unstable_branch);
        ManifoldArc& s = set.get(omega_rec->stable_branch);
        try {
            auto candidates = omega_candidates(find_intersections(u, s), u.lambda);
            Json oj{{"error", "no stable transverse omega candidate"}};
            std::optional<OmegaDecomposition> kept;
            for (std::size_t c = 0; c < std::min<std::size_t>(6, candidates.size()); ++c) {
                IntersectionRecord rec = classify_transversality(candidates[c], u, s);
                if (rec.verdict != Verdict::TopologicallyTransverse) continue;
                double need = rec.t_u * std::pow(u.lambda, 3) * 1.001;
                if (u.tmax() < need) grow(u, need);
                OmegaDecomposition omega = omega_analysis(map, rec, u, s, 512);
                OmegaDecomposition fine = omega_analysis(map, rec, u, s, 1024);
                oj = to_json(omega);
                oj["resolved_count_1024"] = fine.labeling.resolved_count;
                oj["stable_at_1024"] =
                    fine.labeling.resolved_count == omega.labeling.resolved_count &&
                    fine.all_components_touch_both;
                kept = std::move(omega);
                if (oj["stable_at_1024"].get<bool>()) break;
            }
            data["omega"] = oj;
            if (kept && !pgm_out.empty()) {
                std::ofstream pgm(pgm_out);
                kept->labeling.write_pgm(pgm);
            }
        } catch (const std::exception& e) {
            data["omega"] = Json{{"error", e.what()}};
        }
    }

    if (!csv_dir.empty()) {
        fs::create_directories(csv_dir);
        for (Branch b : {Branch::UnstablePlus, Branch::UnstableMinus, Branch::StablePlus,
                         Branch::StableMinus}) {
            const ManifoldArc& arc = set.get(b);
            std::string base = csv_dir + "/" + branch_name(b);
            std::ofstream csv(base + ".csv");
            write_csv(arc, csv);
            Json side;
            side["saddle"] = to_json(arc.saddle);
            side["branch"] = branch_name(b);
            side["lambda"] = arc.lambda;
            side["period"] = arc.period;
            side["d0"] = arc.d0;
            side["vertices"] = arc.size();
            side["tmax"] = arc.tmax();
            side["torus_length"] = arc.torus_length;
            side["truncated"] = arc.truncated;
            side["settings"] = Json{{"seed_tol", arc.settings.seed_tol},
                                    {"h_max", arc.settings.h_max},
                                    {"theta_max", arc.settings.theta_max},
                                    {"tube_tol", arc.settings.tube_tol}};
            std::ofstream sj(base + ".json");
            sj << side.dump(2) << '\n';
        }
    }

    Json config{{"command", "homoclinic"}, {"mu", mu},   {"pairs", pairs_arg},
                {"length", length},        {"tmax", tmax}, {"seed", seed}};
    write_json(make_report(data, config), json_out);
    return 0;
}

int cmd_entropy(double mu, const std::string& map_name, int steps, const std::string& method,
                int iterates, const std::string& json_out, const std::string& mask_out,
                std::uint64_t seed) {
    MapSpec map = make_map(map_name, mu, steps);
    if (map.kind == MapKind::StandardMap && mu == 4.0) {
        std::cerr << "error: mu = 4 is the excluded parameter\n";
        return kExitExcludedParameter;
    }
    Json data;
    data["map"] = map.name();

    if (method == "growth" || method == "both") {
        LengthGrowthOptions opt;
        if (iterates > 0) opt.iterates = iterates;
        EntropyReport rep = length_growth_rate(map, default_growth_seed(map), opt);
        data["growth"] = to_json(rep);
    }
    if (method == "horseshoe" || method == "both") {
        FixedPointRecord p = principal_saddle(map);
        BranchSet set = grow_branch_set(map, p, 30.0);
        Json hs;
        bool done = false;
        for (int attempt = 0; attempt < 3 && !done; ++attempt) {
            PairScan scan = scan_pair(set.u_plus, set.s_plus);
            if (scan.first_transverse) {
                HorseshoeCertificate cert;
                EntropyReport rep = detect_horseshoe(map, *scan.first_transverse, set.u_plus,
                                                     set.s_plus, {}, &cert);
                hs = to_json(rep);
                if (rep.found && !mask_out.empty()) {
                    std::ofstream pgm(mask_out);
                    pgm << "P2\n" << cert.resolution << ' ' << cert.resolution << "\n1\n";
                    for (int j = 0; j < cert.resolution; ++j) {
                        for (int i = 0; i < cert.resolution; ++i) {
                            pgm << int(cert.mask[std::size_t(j) * cert.resolution + i])
                                << (i + 1 == cert.resolution ? '\n' : ' ');
                        }
                    }
                }
                done = true;
            } else {
                grow_to_length(set.u_plus, set.u_plus.torus_length * 2.0);
                grow_to_length(set.s_plus, set.s_plus.torus_length * 2.0);
            }
        }
        if (!done) hs = Json{{"error", "no transverse homoclinic record found"}};
        data["horseshoe"] = hs;
    }
    if (method != "growth" && method != "horseshoe" && method != "both") {
        throw CliError{kExitConfig, "method must be growth, horseshoe or both"};
    }

    Json config{{"command", "entropy"}, {"mu", mu},   {"map", map_name},
                {"method", method},     {"seed", seed}};
    write_json(make_report(data, config), json_out);
    return 0;
}

int cmd_ends(const std::string& fixture_path, int levels, const std::string& json_out,
             std::uint64_t seed) {
    std::ifstream is(fixture_path);
    if (!is) throw CliError{kExitConfig, "cannot open fixture " + fixture_path};
    Json fixture = Json::parse(is, nullptr, false);
    if (fixture.is_discarded()) throw CliError{kExitConfig, "fixture is not valid JSON"};
    if (fixture.value("surface", "torus") != std::string("torus")) {
        throw CliError{kExitConfig, "fixture surfaces other than the torus are not supported"};
    }
    int n = fixture.value("grid", 64);
    CombSurface torus = CombSurface::torus_grid(n);
    std::vector<int> k_edges;
    for (const auto& seg : fixture.at("k_segments")) {
        std::array<int, 4> a{seg[0].get<int>(), seg[1].get<int>(), seg[2].get<int>(),
                             seg[3].get<int>()};
        auto edges = segment_edges(torus, n, a);
        k_edges.insert(k_edges.end(), edges.begin(), edges.end());
    }
    MarkedComplex mc = make_marked(torus, k_edges);

    Json data;
    data["grid"] = n;
    data["genus"] = torus.genus();
    try {
        BoundCheck bound = check_bound(mc, levels);
        data["ends"] = bound.ends;
        data["k_components"] = bound.m;
        data["bound_holds"] = bound.holds;
        data["frontier_components"] = frontier_components(mc);
    } catch (const NotStabilized& e) {
        throw CliError{kExitInternal, std::string("end count did not stabilize: ") + e.what()};
    }
    Json config{{"command", "ends"}, {"fixture", fixture_path}, {"levels", levels},
                {"seed", seed}};
    write_json(make_report(data, config), json_out);
    return 0;
}

int cmd_rotation(double mu, double r0, int n, const std::string& json_out,
                 const std::string& csv_out, std::uint64_t seed) {
    if (mu == 4.0) {
        std::cerr << "error: mu = 4 is the excluded parameter; q is degenerate\n";
        return kExitExcludedParameter;
    }
    if (mu <= 0.0 || mu >= 4.0) {
        throw CliError{kExitConfig, "rotation needs 0 < mu < 4 so that q is elliptic"};
    }
    MapSpec map = MapSpec::standard(mu);
    FixedPointRecord q = classify(map, TorusPoint{0.5, 0.0});
    PolarChart chart = make_polar_chart(map, q);
    if (n <= 0) n = choose_n(chart.alpha);

    double arc_to = std::min(chart.alpha + 0.5, kTwoPi - 0.1);
    ArcTrapReport rep = arc_trap(map, q, r0, 0.0, arc_to, n);

    Json data = to_json(rep);
    Json table = Json::array();
    for (double r : {1e-2, 1e-3, 1e-4}) {
        table.push_back(Json::array({r, measure_epsilon(map, chart, r)}));
    }
    data["epsilon_table"] = table;

    if (!csv_out.empty()) {
        std::ofstream csv(csv_out);
        csv << "x,y\n";
        csv.precision(17);
        for (const auto& p : rep.xi) csv << p.x << ',' << p.y << '\n';
    }
    Json config{{"command", "rotation"}, {"mu", mu},   {"r0", r0},
                {"n", n},                {"seed", seed}};
    write_json(make_report(data, config), json_out);
    return 0;
}

int cmd_sweep(const std::string& range, int jobs, const std::string& json_out,
              std::uint64_t seed) {
    double a = 0, b = 0, step = 0;
    if (std::sscanf(range.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3 || step <= 0.0) {
        throw CliError{kExitConfig, "mu-range syntax is a:b:step with step > 0"};
    }
    if (const char* env = std::getenv("SADDLESCOPE_THREADS")) jobs = std::atoi(env);
    if (jobs <= 0) jobs = 1;

    std::vector<double> mus;
    for (double mu = a; mu <= b + 1e-12; mu += step) mus.push_back(mu);

    std::vector<Json> results(mus.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        for (std::size_t i = cursor.fetch_add(1); i < mus.size(); i = cursor.fetch_add(1)) {
            double mu = mus[i];
            Json row;
            row["mu"] = mu;
            if (mu == 0.0 || mu == 4.0) {
                row["skipped"] = mu == 0.0 ? "trivial twist" : "excluded parameter";
                results[i] = row;
                continue;
            }
            MapSpec map = MapSpec::standard(mu);
            auto fps = find_fixed_points(map, 16);
            Json cls = Json::array();
            for (const auto& rec : fps) cls.push_back(classification_name(rec.classification));
            row["classifications"] = cls;
            EntropyReport growth = length_growth_rate(map, default_growth_seed(map));
            row["growth_bound"] = growth.bound;
            FixedPointRecord p = principal_saddle(map);
            BranchSet set = grow_branch_set(map, p, 25.0);
            PairScan scan = scan_pair(set.u_plus, set.s_plus);
            row["uplus_splus_records"] = scan.records.size();
            row["transverse_found"] = scan.first_transverse.has_value();
            results[i] = row;
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    Json data;
    Json rows = Json::array();
    for (auto& r : results) rows.push_back(std::move(r));
    data["rows"] = rows;
    Json config{{"command", "sweep"}, {"mu_range", range}, {"jobs", jobs}, {"seed", seed}};
    write_json(make_report(data, config), json_out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"standard-map toolkit: fixed points, invariant manifolds, homoclinic "
                 "detection, entropy bounds, polar lifts and end counting"};
    app.require_subcommand(1);

    std::uint64_t seed = 12345;
    std::string kernel = "auto";
    app.add_option("--seed", seed, "run seed recorded in reports");
    app.add_option("--kernel", kernel, "batch kernel: auto, scalar or avx2");

    double mu = 1.0, length = 40.0, tmax = 0.0, r0 = 1e-3, window = 1e-5;
    int resolution = 16, steps = 64, levels = 4, n = 0, jobs = 2, iterates = 0;
    std::string map_name = "standard", json_out, csv_dir, csv_out, pgm_out, mask_out;
    std::string pairs = "all", method = "both", fixture, range;

    app.fallthrough();  // global flags may follow the subcommand

    auto* fp = app.add_subcommand("fixed-points", "locate and classify fixed points");
    fp->add_option("--mu", mu);
    fp->add_option("--map", map_name, "standard, cat or hamiltonian");
    fp->add_option("--steps", steps, "substeps of the hamiltonian time-one map");
    fp->add_option("--resolution", resolution, "seed grid resolution");
    fp->add_option("--json", json_out, "output file (- for stdout)");

    auto* hc = app.add_subcommand("homoclinic", "detect and classify homoclinic points");
    hc->add_option("--mu", mu)->required();
    hc->add_option("--pairs", pairs, "all or UPlus-SPlus[,UMinus-SMinus,...]");
    hc->add_option("--length", length, "torus arc length to grow per branch");
    hc->add_option("--tmax", tmax, "grow branches to this parameter instead");
    hc->add_option("--window", window, "duplicate merge window");
    hc->add_option("--json", json_out);
    hc->add_option("--csv-dir", csv_dir, "directory for branch polyline CSVs");
    hc->add_option("--pgm", pgm_out, "omega labeling dump (graymap text)");

    auto* en = app.add_subcommand("entropy", "entropy lower bounds");
    en->add_option("--mu", mu);
    en->add_option("--map", map_name);
    en->add_option("--steps", steps);
    en->add_option("--method", method, "growth, horseshoe or both");
    en->add_option("--iterates", iterates, "growth iterates (0 = default)");
    en->add_option("--json", json_out);
    en->add_option("--mask", mask_out, "horseshoe strip mask dump (graymap text)");

    auto* ed = app.add_subcommand("ends", "count ends of a fixture complex");
    ed->add_option("--fixture", fixture)->required();
    ed->add_option("--levels", levels);
    ed->add_option("--json", json_out);

    auto* rt = app.add_subcommand("rotation", "elliptic polar lift and arc trap");
    rt->add_option("--mu", mu)->required();
    rt->add_option("--r0", r0);
    rt->add_option("--n", n, "iterate count (0 = minimal admissible)");
    rt->add_option("--json", json_out);
    rt->add_option("--csv", csv_out, "closed curve xi polyline");

    auto* sw = app.add_subcommand("sweep", "per-mu summary over a parameter range");
    sw->add_option("--mu-range", range, "a:b:step")->required();
    sw->add_option("--jobs", jobs, "worker count (SADDLESCOPE_THREADS overrides)");
    sw->add_option("--json", json_out);

    CLI11_PARSE(app, argc, argv);

    if (!select_kernels(kernel)) {
        std::cerr << "error: kernel '" << kernel << "' is not available on this machine\n";
        return kExitConfig;
    }
    if (window <= 0.0 || r0 <= 0.0 || length <= 0.0 || resolution < 8 || levels < 3 ||
        steps < 1) {
        std::cerr << "error: tolerances and resolutions must be positive (window, r0, "
                     "length > 0; resolution >= 8; levels >= 3; steps >= 1)\n";
        return kExitConfig;
    }

    try {
        if (fp->parsed()) {
            return cmd_fixed_points(mu, map_name, steps, resolution, json_out, seed);
        }
        if (hc->parsed()) {
            return cmd_homoclinic(mu, pairs, length, tmax, window, json_out, csv_dir, pgm_out,
                                  seed);
        }
        if (en->parsed()) {
            return cmd_entropy(mu, map_name, steps, method, iterates, json_out, mask_out, seed);
        }
        if (ed->parsed()) return cmd_ends(fixture, levels, json_out, seed);
        if (rt->parsed()) return cmd_rotation(mu, r0, n, json_out, csv_out, seed);
        if (sw->parsed()) return cmd_sweep(range, jobs, json_out, seed);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << '\n';
        return e.code;
    } catch (const InternalError& e) {
        std::cerr << "internal contradiction: " << e.what() << '\n';
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}

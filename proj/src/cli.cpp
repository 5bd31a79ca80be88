#include "lossdyn/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <vector>

#include "lossdyn/circuit.hpp"
#include "lossdyn/high_loss.hpp"
#include "lossdyn/response.hpp"
#include "lossdyn/small_beta.hpp"
#include "lossdyn/sweep.hpp"
#include "lossdyn/system.hpp"

namespace lossdyn::cli {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- parsing

void require_keys(const json& obj, const char* where,
                  std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional) {
    if (!obj.is_object()) {
        throw ConfigError(std::string(where) + " must be an object");
    }
    for (const char* key : required) {
        if (!obj.contains(key)) {
            throw ConfigError(std::string(where) + ": missing required key '" + key + "'");
        }
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : required) known |= (it.key() == key);
        for (const char* key : optional) known |= (it.key() == key);
        if (!known) {
            throw ConfigError(std::string(where) + ": unknown key '" + it.key() + "'");
        }
    }
}

double number_at(const json& obj, const char* where, const char* key) {
    const json& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError(std::string(where) + ": '" + key + "' must be a number");
    }
    return v.get<double>();
}

Complex parse_complex(const json& entry, const char* where) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number()) {
        throw ConfigError(std::string(where) + ": complex entries must be [re, im] number pairs");
    }
    return {entry[0].get<double>(), entry[1].get<double>()};
}

ComplexMatrix parse_matrix(const json& rows, const char* where) {
    if (!rows.is_array() || rows.empty()) {
        throw ConfigError(std::string(where) + ": matrix must be a nonempty array of rows");
    }
    const size_t nrows = rows.size();
    size_t ncols = 0;
    ComplexMatrix m;
    for (size_t i = 0; i < nrows; ++i) {
        const json& row = rows[i];
        if (!row.is_array() || row.empty()) {
            throw ConfigError(std::string(where) + ": each matrix row must be a nonempty array");
        }
        if (i == 0) {
            ncols = row.size();
            m.resize(static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(ncols));
        } else if (row.size() != ncols) {
            throw ConfigError(std::string(where) + ": matrix rows have inconsistent lengths");
        }
        for (size_t j = 0; j < ncols; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                parse_complex(row[j], where);
        }
    }
    return m;
}

ComplexVector parse_vector(const json& entries, const char* where) {
    if (!entries.is_array() || entries.empty()) {
        throw ConfigError(std::string(where) + ": vector must be a nonempty array");
    }
    ComplexVector v(static_cast<Eigen::Index>(entries.size()));
    for (size_t i = 0; i < entries.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = parse_complex(entries[i], where);
    }
    return v;
}

json dump_complex(Complex z) {
    return json::array({z.real(), z.imag()});
}

json dump_matrix(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(dump_complex(m(i, j)));
        }
        rows.push_back(row);
    }
    return rows;
}

struct ParsedInput {
    DissipativeSystem system;
    std::optional<CanonicalCircuit> circuit;  // set when the input was a circuit
};

CircuitSpec parse_circuit(const json& obj) {
    require_keys(obj, "input.circuit", {"c1", "c2", "c12", "l1", "l2", "tau"}, {"beta", "r2"});
    CircuitSpec spec;
    spec.c1 = number_at(obj, "input.circuit", "c1");
    spec.c2 = number_at(obj, "input.circuit", "c2");
    spec.c12 = number_at(obj, "input.circuit", "c12");
    spec.l1 = number_at(obj, "input.circuit", "l1");
    spec.l2 = number_at(obj, "input.circuit", "l2");
    spec.tau = number_at(obj, "input.circuit", "tau");
    if (obj.contains("beta")) spec.beta = number_at(obj, "input.circuit", "beta");
    if (obj.contains("r2")) spec.r2 = number_at(obj, "input.circuit", "r2");
    return spec;
}

ParsedInput parse_input(const json& input) {
    if (!input.is_object()) {
        throw ConfigError("input must be an object");
    }
    ParsedInput out;
    if (input.contains("circuit")) {
        require_keys(input, "input", {"circuit"}, {});
        out.circuit = canonical_system(parse_circuit(input.at("circuit")));
        out.system = out.circuit->system;
    } else {
        require_keys(input, "input", {"omega", "b"}, {});
        out.system = build_system(parse_matrix(input.at("omega"), "input.omega"),
                                  parse_matrix(input.at("b"), "input.b"));
    }
    return out;
}

std::vector<double> parse_beta_grid(const json& obj) {
    require_keys(obj, "beta_grid", {"min", "max", "count"}, {"spacing"});
    double lo = number_at(obj, "beta_grid", "min");
    double hi = number_at(obj, "beta_grid", "max");
    const json& count_v = obj.at("count");
    if (!count_v.is_number_integer() || count_v.get<long>() < 2) {
        throw ConfigError("beta_grid: 'count' must be an integer >= 2");
    }
    long count = count_v.get<long>();
    std::string spacing = obj.contains("spacing") ? obj.at("spacing").get<std::string>() : "linear";
    if (spacing != "linear" && spacing != "log") {
        throw ConfigError("beta_grid: 'spacing' must be 'linear' or 'log'");
    }
    if (!(lo >= 0.0) || !(hi > lo)) {
        throw ConfigError("beta_grid: need 0 <= min < max");
    }
    if (spacing == "log" && !(lo > 0.0)) {
        throw ConfigError("beta_grid: log spacing needs min > 0");
    }
    std::vector<double> grid(static_cast<size_t>(count));
    for (long i = 0; i < count; ++i) {
        double t = static_cast<double>(i) / static_cast<double>(count - 1);
        grid[static_cast<size_t>(i)] =
            (spacing == "linear") ? lo + t * (hi - lo) : lo * std::pow(hi / lo, t);
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

// ------------------------------------------------------------- rendering

std::string bool01(bool v) { return v ? "1" : "0"; }

std::string branch_class_name(BranchClass k) {
    switch (k) {
        case BranchClass::HighLoss: return "high-loss";
        case BranchClass::LowLoss: return "low-loss";
        default: return "unresolved";
    }
}

std::string regime_name(ForcingRegime r) {
    return r == ForcingRegime::InsideLossSubspace ? "f-inside-loss-subspace"
                                                  : "f-has-no-loss-component";
}

json json_number_or_inf(double v) {
    if (std::isinf(v)) return json("inf");
    return json(v);
}

// Sample-level quality factor from an eigenvalue.
std::pair<double, bool> sample_quality(Complex zeta) {
    if (zeta.imag() < -1e-12 * std::abs(zeta)) {
        return {-0.5 * std::abs(zeta.real()) / zeta.imag(), true};
    }
    return {std::numeric_limits<double>::infinity(), false};
}

struct AnalyzeData {
    Eigen::Index n = 0, n_b = 0;
    double delta_b = 0.0;
    Eigen::Index orbit_dimension = 0;
    std::vector<HighLossMode> high;
    std::vector<LowLossMode> low;
    std::vector<SmallBetaMode> small;
    std::vector<DegeneracyDiagnostic> degeneracy;
    // Circuit cross-checks: closed-form and tracked values per low-loss mode.
    bool has_circuit = false;
    double beta = 0.0, r2 = 0.0;
    RealMatrix phi, phi_squared;
    std::vector<double> rho_closed, d_closed, rho_tracked, d_tracked;
};

// Closed-form low-loss coefficients of the two-loop circuit, ascending rho.
void circuit_closed_form(const PhiPair& phi, double tau, std::vector<double>& rho,
                         std::vector<double>& d) {
    double p11 = phi.phi(0, 0), p12 = phi.phi(0, 1), p22 = phi.phi(1, 1);
    double s = p11 * p11 + p12 * p12;
    double rho_osc = std::sqrt(s);
    double d_zero = tau * std::pow(p12 * p12 - p11 * p22, 2) / s;
    double d_osc = 0.5 * tau * p12 * p12 * std::pow(p11 + p22, 2) / s;
    rho = {-rho_osc, 0.0, rho_osc};
    d = {d_osc, d_zero, d_osc};
}

AnalyzeData analyze_data(const ParsedInput& input) {
    AnalyzeData out;
    const DissipativeSystem& sys = input.system;
    out.n = sys.n;
    out.n_b = sys.n_b;
    out.delta_b = sys.loss_fraction();

    BlockDecomposition decomp = decompose(sys);
    out.high = high_loss_coefficients(decomp, sys.omega);
    out.low = low_loss_coefficients(decomp);
    out.small = small_beta_coefficients(sys);
    out.orbit_dimension = orbit_subspace(sys).dimension;
    out.degeneracy = degeneracy_report(out.low, sys.omega);

    if (input.circuit) {
        out.has_circuit = true;
        out.beta = input.circuit->beta;
        out.r2 = input.circuit->r2;
        out.phi = input.circuit->phi.phi;
        out.phi_squared = input.circuit->phi.phi_squared;
        circuit_closed_form(input.circuit->phi, input.circuit->tau, out.rho_closed, out.d_closed);

        // Tracked large-beta values from the eigensolver, matched per mode.
        const double beta_probe = 1e4;
        EigenDecomposition ed = general_eig(assemble(sys, beta_probe));
        for (const auto& mode : out.low) {
            Complex target = eval_eigenvalue_asymptote(mode, beta_probe);
            Eigen::Index best = 0;
            double best_dist = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i) {
                double dist = std::abs(ed.eigenvalues(i) - target);
                if (dist < best_dist) {
                    best_dist = dist;
                    best = i;
                }
            }
            out.rho_tracked.push_back(ed.eigenvalues(best).real());
            out.d_tracked.push_back(beta_probe * std::abs(ed.eigenvalues(best).imag()));
        }
    }
    return out;
}

std::string render_analyze_csv(const AnalyzeData& a) {
    std::ostringstream os;
    os << "quantity,value\n";
    os << "n," << a.n << "\n";
    os << "n_b," << a.n_b << "\n";
    os << "delta_b," << format_shortest(a.delta_b) << "\n";
    os << "orbit_dimension," << a.orbit_dimension << "\n";
    if (a.has_circuit) {
        os << "beta," << format_shortest(a.beta) << "\n";
        os << "r2," << format_shortest(a.r2) << "\n";
        const char* names[3] = {"11", "12", "22"};
        double phi_vals[3] = {a.phi(0, 0), a.phi(0, 1), a.phi(1, 1)};
        double phi2_vals[3] = {a.phi_squared(0, 0), a.phi_squared(0, 1), a.phi_squared(1, 1)};
        for (int k = 0; k < 3; ++k) {
            os << "phi_" << names[k] << "," << format_shortest(phi_vals[k]) << "\n";
        }
        for (int k = 0; k < 3; ++k) {
            os << "phi2_" << names[k] << "," << format_shortest(phi2_vals[k]) << "\n";
        }
    }
    os << "\nmode_class,index,param1,param2,degenerate_group\n";
    for (const auto& m : a.high) {
        os << "high-loss," << m.index << "," << format_shortest(m.zeta_ring) << ","
           << format_shortest(m.rho) << "," << m.degenerate_group << "\n";
    }
    for (const auto& m : a.low) {
        os << "low-loss," << m.index << "," << format_shortest(m.rho) << ","
           << format_shortest(m.d) << "," << m.degenerate_group << "\n";
    }
    for (const auto& m : a.small) {
        os << "small-beta," << m.index << "," << format_shortest(m.omega_j) << ","
           << format_shortest(m.sigma_j) << "," << m.degenerate_group << "\n";
    }
    os << "\nindex,rho,d,in_omega_eigenspace,in_ker_omega\n";
    for (const auto& diag : a.degeneracy) {
        os << diag.index << "," << format_shortest(diag.rho) << "," << format_shortest(diag.d)
           << "," << bool01(diag.in_omega_eigenspace) << "," << bool01(diag.in_ker_omega) << "\n";
    }
    if (a.has_circuit) {
        os << "\nlow_mode,rho_pipeline,rho_closed_form,rho_tracked,d_pipeline,d_closed_form,"
              "d_tracked\n";
        for (size_t k = 0; k < a.low.size(); ++k) {
            os << a.low[k].index << "," << format_shortest(a.low[k].rho) << ","
               << format_shortest(a.rho_closed[k]) << "," << format_shortest(a.rho_tracked[k])
               << "," << format_shortest(a.low[k].d) << "," << format_shortest(a.d_closed[k])
               << "," << format_shortest(a.d_tracked[k]) << "\n";
        }
    }
    return os.str();
}

json render_analyze_json(const AnalyzeData& a) {
    json doc;
    doc["n"] = a.n;
    doc["n_b"] = a.n_b;
    doc["delta_b"] = a.delta_b;
    doc["orbit_dimension"] = a.orbit_dimension;
    json high = json::array();
    for (const auto& m : a.high) {
        high.push_back({{"index", m.index},
                        {"zeta_ring", m.zeta_ring},
                        {"rho", m.rho},
                        {"degenerate_group", m.degenerate_group}});
    }
    doc["high_loss_modes"] = high;
    json low = json::array();
    for (const auto& m : a.low) {
        low.push_back({{"index", m.index},
                       {"rho", m.rho},
                       {"d", m.d},
                       {"degenerate_group", m.degenerate_group}});
    }
    doc["low_loss_modes"] = low;
    json small = json::array();
    for (const auto& m : a.small) {
        small.push_back({{"index", m.index},
                         {"omega", m.omega_j},
                         {"sigma", m.sigma_j},
                         {"degenerate_group", m.degenerate_group}});
    }
    doc["small_beta_modes"] = small;
    json degeneracy = json::array();
    for (const auto& d : a.degeneracy) {
        degeneracy.push_back({{"index", d.index},
                              {"rho", d.rho},
                              {"d", d.d},
                              {"in_omega_eigenspace", d.in_omega_eigenspace},
                              {"in_ker_omega", d.in_ker_omega}});
    }
    doc["degeneracy_report"] = degeneracy;
    if (a.has_circuit) {
        json circuit;
        circuit["beta"] = a.beta;
        circuit["r2"] = a.r2;
        circuit["phi"] = dump_matrix(a.phi.cast<Complex>());
        circuit["phi_squared"] = dump_matrix(a.phi_squared.cast<Complex>());
        json checks = json::array();
        for (size_t k = 0; k < a.low.size(); ++k) {
            checks.push_back({{"index", a.low[k].index},
                              {"rho_pipeline", a.low[k].rho},
                              {"rho_closed_form", a.rho_closed[k]},
                              {"rho_tracked", a.rho_tracked[k]},
                              {"d_pipeline", a.low[k].d},
                              {"d_closed_form", a.d_closed[k]},
                              {"d_tracked", a.d_tracked[k]}});
        }
        circuit["low_mode_checks"] = checks;
        doc["circuit"] = circuit;
    }
    return doc;
}

struct SweepData {
    std::vector<SpectralBranch> branches;
    std::optional<CriticalPoint> critical;
};

SweepData sweep_data(const DissipativeSystem& sys, const std::vector<double>& grid) {
    SweepData out;
    out.branches = sweep(sys, grid);

    BlockDecomposition decomp = decompose(sys);
    auto high = high_loss_coefficients(decomp, sys.omega);
    auto low = low_loss_coefficients(decomp);
    try {
        classify(out.branches, high, low);
    } catch (const Error&) {
        // Grid too short for asymptotic labeling; branches stay unresolved.
    }
    detect_overdamping(out.branches);

    // If some branch becomes overdamped strictly inside the grid, refine the
    // earliest such onset into a critical point.
    double onset = std::numeric_limits<double>::infinity();
    for (const auto& b : out.branches) {
        if (b.overdamped_from && *b.overdamped_from > grid.front()) {
            onset = std::min(onset, *b.overdamped_from);
        }
    }
    if (std::isfinite(onset)) {
        double lo = grid.front();
        for (double beta : grid) {
            if (beta < onset) lo = beta;
        }
        try {
            out.critical = locate_critical_point(sys, lo, onset);
        } catch (const Error&) {
            // No clean two-branch merge inside the bracket; leave summary empty.
        }
    }
    return out;
}

std::string render_sweep_csv(const SweepData& s) {
    std::ostringstream os;
    os << "beta,branch_id,class,re_zeta,im_zeta,q_factor,overdamped\n";
    const size_t samples = s.branches.front().samples.size();
    for (size_t k = 0; k < samples; ++k) {
        for (const auto& b : s.branches) {
            const auto& [beta, zeta] = b.samples[k];
            auto [q, finite] = sample_quality(zeta);
            bool overdamped = b.overdamped_from && beta >= *b.overdamped_from;
            os << format_shortest(beta) << "," << b.branch_id << ","
               << branch_class_name(b.klass) << "," << format_shortest(zeta.real()) << ","
               << format_shortest(zeta.imag()) << "," << (finite ? format_shortest(q) : "inf")
               << "," << bool01(overdamped) << "\n";
        }
    }
    if (s.critical) {
        os << "\nkey,value\n";
        os << "beta0," << format_shortest(s.critical->beta0) << "\n";
        os << "zeta0_re," << format_shortest(s.critical->zeta0.real()) << "\n";
        os << "zeta0_im," << format_shortest(s.critical->zeta0.imag()) << "\n";
        os << "merge_residual," << format_shortest(s.critical->refinement_residual) << "\n";
    }
    return os.str();
}

json render_sweep_json(const SweepData& s) {
    json doc;
    json branches = json::array();
    for (const auto& b : s.branches) {
        json rows = json::array();
        for (const auto& [beta, zeta] : b.samples) {
            auto [q, finite] = sample_quality(zeta);
            rows.push_back({{"beta", beta},
                            {"re_zeta", zeta.real()},
                            {"im_zeta", zeta.imag()},
                            {"q_factor", json_number_or_inf(q)}});
        }
        json jb = {{"branch_id", b.branch_id},
                   {"class", branch_class_name(b.klass)},
                   {"samples", rows}};
        if (b.overdamped_from) jb["overdamped_from"] = *b.overdamped_from;
        branches.push_back(jb);
    }
    doc["branches"] = branches;
    if (s.critical) {
        doc["summary"] = {{"beta0", s.critical->beta0},
                          {"zeta0", dump_complex(s.critical->zeta0)},
                          {"merge_residual", s.critical->refinement_residual}};
    }
    return doc;
}

struct RespondRow {
    double beta, u, w_dis, q, u_asym, w_asym, q_asym;
    bool q_finite, q_asym_finite;
    ForcingRegime regime;
};

std::vector<RespondRow> respond_data(const DissipativeSystem& sys, const ComplexVector& f,
                                     double omega, const std::vector<double>& grid) {
    BlockDecomposition decomp = decompose(sys);
    AdmittanceExpansion exp = admittance_expansion(decomp, omega);

    const Eigen::Index nb = decomp.n_b;
    const Eigen::Index nk = sys.n - nb;
    ComplexVector f_block = decomp.basis.adjoint() * f;
    bool inside = f_block.segment(nb, nk).norm() <= 1e-12 * f.norm();

    double u_coef = 0.0, w_coef = 0.0, u_limit = 0.0;
    if (inside) {
        ComplexMatrix xi1 = omega * ComplexMatrix::Identity(nk, nk) - decomp.omega1;
        Eigen::PartialPivLU<ComplexMatrix> lu_xi1(xi1);
        ComplexMatrix xi1_inv = lu_xi1.inverse();
        Eigen::PartialPivLU<ComplexMatrix> lu_b2(decomp.b2);
        ComplexMatrix b2_inv = lu_b2.inverse();
        ComplexMatrix m22 = b2_inv * b2_inv +
                            b2_inv * decomp.theta * xi1_inv.adjoint() * xi1_inv *
                                decomp.theta.adjoint() * b2_inv;
        ComplexVector f2 = f_block.head(nb);
        u_coef = 0.5 * (f2.dot(m22 * f2)).real();
        w_coef = (f2.dot(b2_inv * f2)).real();
    } else {
        ResponseLimits limits = response_limits(decomp, f, omega);
        u_limit = limits.stored_energy;
        w_coef = (f.dot(exp.w_minus1 * f)).real();
    }

    std::vector<RespondRow> rows;
    rows.reserve(grid.size());
    for (double beta : grid) {
        ResponseReport rep = respond(sys, f, omega, beta);
        RespondRow row{};
        row.beta = beta;
        row.u = rep.stored_energy;
        row.w_dis = rep.dissipated_power;
        row.q = rep.quality_factor;
        row.q_finite = rep.quality_finite;
        row.regime = rep.regime;
        if (inside) {
            row.u_asym = u_coef / (beta * beta);
            row.w_asym = w_coef / beta;
            row.q_asym = (w_coef > 0.0) ? std::abs(omega) * u_coef / w_coef / beta
                                        : std::numeric_limits<double>::infinity();
            row.q_asym_finite = w_coef > 0.0;
        } else {
            row.u_asym = u_limit;
            row.w_asym = w_coef / beta;
            bool finite = w_coef > 1e-14 * f.squaredNorm();
            row.q_asym = finite ? std::abs(omega) * u_limit / w_coef * beta
                                : std::numeric_limits<double>::infinity();
            row.q_asym_finite = finite;
        }
        rows.push_back(row);
    }
    return rows;
}

std::string render_respond_csv(const std::vector<RespondRow>& rows) {
    std::ostringstream os;
    os << "beta,U,W_dis,Q,regime_class,U_asym,Wdis_asym,Q_asym\n";
    for (const auto& r : rows) {
        os << format_shortest(r.beta) << "," << format_shortest(r.u) << ","
           << format_shortest(r.w_dis) << "," << (r.q_finite ? format_shortest(r.q) : "inf")
           << "," << regime_name(r.regime) << "," << format_shortest(r.u_asym) << ","
           << format_shortest(r.w_asym) << ","
           << (r.q_asym_finite ? format_shortest(r.q_asym) : "inf") << "\n";
    }
    return os.str();
}

json render_respond_json(const std::vector<RespondRow>& rows) {
    json doc = json::array();
    for (const auto& r : rows) {
        doc.push_back({{"beta", r.beta},
                       {"U", r.u},
                       {"W_dis", r.w_dis},
                       {"Q", json_number_or_inf(r.q_finite ? r.q
                                                           : std::numeric_limits<double>::infinity())},
                       {"regime_class", regime_name(r.regime)},
                       {"U_asym", r.u_asym},
                       {"Wdis_asym", r.w_asym},
                       {"Q_asym", json_number_or_inf(
                                      r.q_asym_finite ? r.q_asym
                                                      : std::numeric_limits<double>::infinity())}});
    }
    return json{{"rows", doc}};
}

json render_circuit_json(const CanonicalCircuit& c) {
    json doc;
    doc["beta"] = c.beta;
    doc["omega"] = dump_matrix(c.system.omega);
    doc["b"] = dump_matrix(c.system.b);
    doc["phi"] = dump_matrix(c.phi.phi.cast<Complex>());
    doc["phi_squared"] = dump_matrix(c.phi.phi_squared.cast<Complex>());
    return doc;
}

} // namespace

std::string format_shortest(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[64];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

RunResult run(const std::string& config_text, const std::optional<std::string>& command_override,
              const std::optional<std::string>& output_override) {
    RunResult result;
    try {
        json config = json::parse(config_text);
        require_keys(config, "config", {"command", "input"},
                     {"beta_grid", "response", "output"});

        std::string command = command_override.value_or(config.at("command").get<std::string>());
        std::string format = (command == "circuit") ? "structured" : "csv";
        if (config.contains("output")) {
            require_keys(config.at("output"), "output", {}, {"path", "format"});
            if (config.at("output").contains("path")) {
                result.output_path = config.at("output").at("path").get<std::string>();
            }
            if (config.at("output").contains("format")) {
                format = config.at("output").at("format").get<std::string>();
            }
        }
        if (format != "csv" && format != "structured") {
            throw ConfigError("output.format must be 'csv' or 'structured'");
        }
        if (output_override) result.output_path = *output_override;

        if (command == "analyze") {
            ParsedInput input = parse_input(config.at("input"));
            AnalyzeData data = analyze_data(input);
            result.output = (format == "csv") ? render_analyze_csv(data)
                                              : render_analyze_json(data).dump(2) + "\n";
        } else if (command == "sweep") {
            if (!config.contains("beta_grid")) {
                throw ConfigError("sweep: missing required key 'beta_grid'");
            }
            ParsedInput input = parse_input(config.at("input"));
            std::vector<double> grid = parse_beta_grid(config.at("beta_grid"));
            SweepData data = sweep_data(input.system, grid);
            result.output = (format == "csv") ? render_sweep_csv(data)
                                              : render_sweep_json(data).dump(2) + "\n";
        } else if (command == "respond") {
            if (!config.contains("response")) {
                throw ConfigError("respond: missing required key 'response'");
            }
            if (!config.contains("beta_grid")) {
                throw ConfigError("respond: missing required key 'beta_grid'");
            }
            require_keys(config.at("response"), "response", {"omega", "f"}, {});
            ParsedInput input = parse_input(config.at("input"));
            double omega = number_at(config.at("response"), "response", "omega");
            ComplexVector f = parse_vector(config.at("response").at("f"), "response.f");
            if (f.size() != input.system.n || f.norm() == 0.0) {
                throw ConfigError("response.f must be a nonzero vector matching the system dimension");
            }
            std::vector<double> grid = parse_beta_grid(config.at("beta_grid"));
            if (!(grid.front() > 0.0)) {
                throw ConfigError("respond: beta_grid must start above 0");
            }
            auto rows = respond_data(input.system, f, omega, grid);
            result.output = (format == "csv") ? render_respond_csv(rows)
                                              : render_respond_json(rows).dump(2) + "\n";
        } else if (command == "circuit") {
            if (format == "csv") {
                throw ConfigError("circuit: output is matrix-valued; use format 'structured'");
            }
            const json& input = config.at("input");
            if (!input.is_object() || !input.contains("circuit")) {
                throw ConfigError("circuit: input.circuit is required");
            }
            require_keys(input, "input", {"circuit"}, {});
            CanonicalCircuit c = canonical_system(parse_circuit(input.at("circuit")));
            result.output = render_circuit_json(c).dump(2) + "\n";
        } else {
            throw ConfigError("unknown command '" + command + "'");
        }
        result.exit_code = 0;
    } catch (const ResonantFrequency& e) {
        result.exit_code = 3;
        result.diagnostic = e.what();
    } catch (const Error& e) {
        result.exit_code = 2;
        result.diagnostic = e.what();
    } catch (const json::exception& e) {
        result.exit_code = 2;
        result.diagnostic = std::string("ConfigError: ") + e.what();
    } catch (const std::exception& e) {
        result.exit_code = 1;
        result.diagnostic = e.what();
    }
    return result;
}

} // namespace lossdyn::cli

// bhchaos: exact-diagonalization chaos analysis of the 1D Bose-Hubbard chain
// and the bosonic two-body embedded ensemble. Subcommands emit the data files
// behind each figure-style analysis; all outputs are deterministic given the
// configuration and seed.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "bhchaos/baselines.hpp"
#include "bhchaos/bhh.hpp"
#include "bhchaos/chaos.hpp"
#include "bhchaos/compare.hpp"
#include "bhchaos/egoe.hpp"
#include "bhchaos/spectra.hpp"

using namespace bhc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
    int n = 0;
    int l = 0;
    std::string bc = "hwbc";
    int q = -1;                 // -1: absent
    int parity = 0;             // 0: absent
    std::string basis = "interaction";
    std::string model = "bhh";  // spectrum: bhh | egoe
    std::string eta_grid;       // "lo:hi:count" (log spaced) or comma list
    double eta = std::numeric_limits<double>::quiet_NaN();
    std::string eps;            // comma list of eps targets
    int k_states = 100;
    double lambda = 1.0;
    std::string lambda_grid;
    int realizations = 100;
    std::uint64_t seed = 12345;
    int threads = 1;
    std::string out = "out";
    std::string format = "csv";
    int bins = 100;
    std::int64_t dense_cap = kDefaultDenseCap;
    bool export_basis = false;
    bool export_matrix = false;
    bool export_vectors = false;
    bool gfd = false;
    bool no_gfd = false;
    std::string dims;           // baselines: comma list
    std::string extra_q;        // additional finite q values for gfd records
    std::string config_path;

    std::string canonical() const {
        std::ostringstream os;
        os << "n=" << n << ";l=" << l << ";bc=" << bc << ";q=" << q << ";parity=" << parity
           << ";basis=" << basis << ";model=" << model << ";eta_grid=" << eta_grid
           << ";eta=" << format_double(eta) << ";eps=" << eps << ";k=" << k_states
           << ";lambda=" << format_double(lambda) << ";lambda_grid=" << lambda_grid
           << ";realizations=" << realizations << ";seed=" << seed << ";format=" << format
           << ";bins=" << bins << ";dims=" << dims << ";extra_q=" << extra_q;
        return os.str();
    }
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--n", o.n, "particle count N");
    cmd->add_option("--l", o.l, "site / mode count L");
    cmd->add_option("--bc", o.bc, "boundary conditions")->check(CLI::IsMember({"hwbc", "pbc"}));
    cmd->add_option("--q", o.q, "quasimomentum sector (PBC; only 0 supported)");
    cmd->add_option("--parity", o.parity, "reflection parity +1|-1")
        ->check(CLI::IsMember({-1, 0, 1}));
    cmd->add_option("--basis", o.basis, "natural basis")
        ->check(CLI::IsMember({"interaction", "tunneling"}));
    cmd->add_option("--eta", o.eta, "scaled tunneling strength J/(U N), with U = 1");
    cmd->add_option("--eta-grid", o.eta_grid, "eta grid: 'lo:hi:count' (log) or comma list");
    cmd->add_option("--eps", o.eps, "target scaled energies, comma list");
    cmd->add_option("--k-states", o.k_states, "eigenstates per energy target");
    cmd->add_option("--lambda", o.lambda, "two-body strength of the embedded ensemble");
    cmd->add_option("--realizations", o.realizations, "ensemble realizations");
    cmd->add_option("--seed", o.seed, "base RNG seed");
    cmd->add_option("--threads", o.threads, "worker threads");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--format", o.format, "matrix export format")
        ->check(CLI::IsMember({"csv", "json", "bin"}));
    cmd->add_option("--bins", o.bins, "energy bins on [0,1]");
    cmd->add_option("--dense-cap", o.dense_cap, "dense diagonalization cap");
    cmd->add_option("--config", o.config_path,
                    "key=value file providing defaults; explicit flags win");
}

// Splice `key=value` lines from the config file into the argument list as
// `--key value` pairs, after the subcommand and before the user's own flags,
// skipping keys the command line already sets.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") path = args[i + 1];
    for (const auto& a : args)
        if (a.rfind("--config=", 0) == 0) path = a.substr(9);
    if (path.empty()) return args;
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path);

    std::set<std::string> given;
    for (const auto& a : args)
        if (a.rfind("--", 0) == 0) given.insert(a.substr(0, a.find('=')));

    std::vector<std::string> extra;
    std::string line;
    while (std::getline(f, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            auto e = s.find_last_not_of(" \t\r");
            s.erase(e == std::string::npos ? 0 : e + 1);
            return s;
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;
        if (key.rfind("--", 0) != 0) key = "--" + key;
        if (key == "--config" || given.count(key)) continue;
        if (value == "true") {
            extra.push_back(key);
        } else {
            extra.push_back(key);
            extra.push_back(value);
        }
    }
    if (args.empty()) return args;
    std::vector<std::string> out;
    out.push_back(args.front());  // the subcommand
    out.insert(out.end(), extra.begin(), extra.end());
    out.insert(out.end(), args.begin() + 1, args.end());
    return out;
}

std::vector<double> parse_list(const std::string& s, const char* field) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            v.push_back(std::stod(tok));
        } catch (...) {
            throw ConfigError(std::string("cannot parse '") + tok + "' in --" + field);
        }
    }
    return v;
}

std::vector<double> parse_grid(const std::string& s, const char* field) {
    if (s.find(':') == std::string::npos) return parse_list(s, field);
    double lo, hi;
    int count;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 1 || lo <= 0 ||
        hi < lo)
        throw ConfigError(std::string("bad grid spec in --") + field + ": '" + s + "'");
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i)
        v[i] = count == 1 ? lo
                          : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (count - 1));
    return v;
}

std::optional<int> opt_q(const Options& o) {
    return o.q >= 0 ? std::optional<int>(o.q) : std::nullopt;
}
std::optional<int> opt_parity(const Options& o) {
    return o.parity != 0 ? std::optional<int>(o.parity) : std::nullopt;
}

SectorSpec sector_from(const Options& o, FockKind kind) {
    SectorSpec s;
    s.bc = o.bc == "pbc" ? Bc::pbc : Bc::hwbc;
    s.Q = opt_q(o);
    s.parity = opt_parity(o);
    s.N = o.n;
    s.L = o.l;
    s.kind = kind;
    s.validate();
    return s;
}

FockKind kind_from(const Options& o) {
    return o.basis == "tunneling" ? FockKind::mode : FockKind::site;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

SectorSpec egoe_sector(const Options& o) {
    if (o.q >= 0)
        throw ConfigError(
            "the embedded ensemble carries no translation symmetry; momentum sectors (--q) "
            "are not applicable, use hwbc parity sectors");
    return sector_from(o, FockKind::site);
}

// ---- output helpers -------------------------------------------------------

class Report {
  public:
    Report(const Options& o, const std::string& command) : o_(o) {
        canonical_ = command + ";" + o.canonical();
        fs::create_directories(o.out);
    }

    std::ofstream csv(const std::string& name) const {
        std::ofstream f(fs::path(o_.out) / name, std::ios::binary);
        if (!f) throw Error("cannot open output file " + name);
        f << "# tool: bhchaos " << kVersion << "\n";
        f << "# config: " << canonical_ << "\n";
        char hex[20];
        std::snprintf(hex, sizeof hex, "%016llx",
                      static_cast<unsigned long long>(fnv1a(canonical_)));
        f << "# config_hash: " << hex << "\n";
        f << "# seed: " << o_.seed << "\n";
        return f;
    }

    void write_json(const std::string& name, json j) const {
        char hex[20];
        std::snprintf(hex, sizeof hex, "%016llx",
                      static_cast<unsigned long long>(fnv1a(canonical_)));
        j["meta"] = {{"tool", std::string("bhchaos ") + kVersion},
                     {"config", canonical_},
                     {"config_hash", hex},
                     {"seed", o_.seed}};
        std::ofstream f(fs::path(o_.out) / name, std::ios::binary);
        if (!f) throw Error("cannot open output file " + name);
        f << j.dump(2) << "\n";
    }

    const Options& opts() const { return o_; }

  private:
    Options o_;
    std::string canonical_;
};

void export_matrix(const Report& rep, const SymmetricMatrix& m, const std::string& stem) {
    if (rep.opts().format == "bin") {
        std::ofstream f(fs::path(rep.opts().out) / (stem + ".bin"), std::ios::binary);
        m.write_binary(f);
    } else {
        auto f = rep.csv(stem + ".csv");
        m.write_triplet_csv(f);
    }
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? format_double(*v) : "";
}

// ---- model assembly -------------------------------------------------------

SymmetricMatrix build_model(const Options& o, const SectorBasis& basis, double eta,
                            std::uint64_t realization) {
    if (o.model == "egoe") {
        EgoeParams p;
        p.N = o.n;
        p.L = o.l;
        p.lambda = o.lambda;
        p.reflection_symmetric = basis.spec().parity.has_value();
        p.seed = o.seed;
        p.realization = realization;
        return sample_egoe(p, basis);
    }
    BhhParams p = BhhParams::from_eta(eta, o.n, o.l, o.bc == "pbc" ? Bc::pbc : Bc::hwbc,
                                      o.basis == "tunneling" ? BasisKind::tunneling
                                                             : BasisKind::interaction);
    return build_bhh(p, basis);
}

// ---- subcommands ----------------------------------------------------------

int run_basis(const Options& o) {
    require(o.n >= 1 && o.l >= 1, "basis: --n and --l are required");
    Report rep(o, "basis");
    auto f = rep.csv("basis_dims.csv");
    f << "sector,dim\n";
    std::uint64_t full = full_dimension(o.n, o.l);
    f << "full," << full << "\n";
    std::vector<SectorSpec> specs;
    if (o.bc == "hwbc") {
        for (int pi : {+1, -1}) {
            SectorSpec s;
            s.N = o.n;
            s.L = o.l;
            s.parity = pi;
            specs.push_back(s);
        }
    } else {
        for (int pi : {+1, -1}) {
            SectorSpec s;
            s.bc = Bc::pbc;
            s.Q = 0;
            s.N = o.n;
            s.L = o.l;
            s.parity = pi;
            specs.push_back(s);
        }
        SectorSpec sq;
        sq.bc = Bc::pbc;
        sq.Q = 0;
        sq.N = o.n;
        sq.L = o.l;
        std::uint64_t q0 = sector_dimension(sq);
        f << "pbc(Q=0)," << q0 << "\n";
        f << "pbc(Q!=0 complement)," << (full - q0) << "\n";
    }
    for (const auto& s : specs) f << s.label() << "," << sector_dimension(s) << "\n";

    if (o.export_basis) {
        for (const auto& s : specs) {
            auto b = SectorBasis::build(s);
            std::string name = "basis_" + std::to_string(o.n) + "_" + std::to_string(o.l) +
                               (s.parity.value_or(0) > 0 ? "_pi+1" : "_pi-1");
            auto g = rep.csv(name + ".csv");
            g << "index";
            for (int i = 1; i <= o.l; ++i) g << ",occ_" << i;
            g << ",norm\n";
            for (std::int64_t i = 0; i < b.dim(); ++i) {
                g << i;
                for (int v : b.rep(i)) g << ',' << v;
                g << ',' << format_double(b.norm(i)) << "\n";
            }
        }
    }
    return 0;
}

int run_spectrum(const Options& o) {
    require(o.n >= 1 && o.l >= 1, "spectrum: --n and --l are required");
    if (o.model == "bhh")
        require(std::isfinite(o.eta), "spectrum: --eta is required for the bhh model");
    Report rep(o, "spectrum");
    auto basis = SectorBasis::build(o.model == "egoe" ? egoe_sector(o)
                                                        : sector_from(o, kind_from(o)));
    auto H = build_model(o, basis, o.eta, 0);
    if (o.export_matrix) export_matrix(rep, H, "matrix");

    auto s = full_diagonalize(H, o.gfd || o.export_vectors, o.dense_cap);
    if (o.export_vectors) {
        std::ofstream f(fs::path(o.out) / "vectors.bin", std::ios::binary);
        s.write_vectors_binary(f);
    }

    {
        auto f = rep.csv("spectrum.csv");
        f << "index,E,eps\n";
        for (std::int64_t i = 0; i < s.dim; ++i)
            f << i << ',' << format_double(s.eigenvalues[i]) << ','
              << (s.eps.empty() ? "" : format_double(s.eps[i])) << "\n";
    }
    if (s.dim >= 2 && !s.eps.empty()) {
        auto h = dos_histogram(s, o.bins);
        auto f = rep.csv("dos.csv");
        f << "# eps_star: " << format_double(h.eps_star) << "\n";
        f << "# degenerate_spacings: " << s.degenerate_spacings << "\n";
        f << "bin,eps_center,count\n";
        for (int b = 0; b < o.bins; ++b)
            f << b << ',' << format_double((b + 0.5) / o.bins) << ',' << h.counts[b] << "\n";
    }
    if (o.gfd) {
        auto extra = parse_list(o.extra_q, "extra-q");
        auto recs = gfd_records(s, extra);
        auto f = rep.csv("gfd.csv");
        f << "state_index,E,eps,d1,d2,dinf";
        for (double q : extra) f << ",d" << format_double(q);
        f << "\n";
        for (const auto& r : recs) {
            f << r.state_index << ',' << format_double(r.E) << ',' << format_double(r.eps) << ','
              << format_double(r.d1) << ',' << format_double(r.d2) << ','
              << format_double(r.dinf);
            for (double q : extra) f << ',' << format_double(r.dq_extra.at(q));
            f << "\n";
        }
    }
    return 0;
}

struct TargetRow {
    double x = 0;  // eta or lambda
    double eps_target = 0;
    MomentStats d1, d2, dinf;
};

void write_grid_rows(std::ofstream& f, double eta, const EtaScan& scan) {
    auto row = [&](double c, const char* name, double value, double se, std::int64_t n) {
        f << format_double(eta) << ',' << format_double(c) << ',' << name << ','
          << format_double(value) << ',' << format_double(se) << ',' << n << "\n";
    };
    for (const auto& c : scan.cells) {
        if (c.mean_r) row(c.eps_center, "r_mean", *c.mean_r, 0.0, c.n_r);
        if (c.d1) {
            row(c.eps_center, "d1_mean", c.d1->mean, c.d1->stderr_mean, c.d1->count);
            row(c.eps_center, "d1_var", c.d1->var, 0.0, c.d1->count);
            if (c.d1->skew) row(c.eps_center, "d1_skew", *c.d1->skew, 0.0, c.d1->count);
            row(c.eps_center, "d2_mean", c.d2->mean, c.d2->stderr_mean, c.d2->count);
            row(c.eps_center, "d2_var", c.d2->var, 0.0, c.d2->count);
            if (c.d2->skew) row(c.eps_center, "d2_skew", *c.d2->skew, 0.0, c.d2->count);
            row(c.eps_center, "dinf_mean", c.dinf->mean, c.dinf->stderr_mean, c.dinf->count);
            row(c.eps_center, "dinf_var", c.dinf->var, 0.0, c.dinf->count);
            if (c.dinf->skew) row(c.eps_center, "dinf_skew", *c.dinf->skew, 0.0, c.dinf->count);
        }
    }
}

int run_scan(const Options& o) {
    require(o.n >= 1 && o.l >= 1, "scan: --n and --l are required");
    std::vector<double> etas;
    if (!o.eta_grid.empty())
        etas = parse_grid(o.eta_grid, "eta-grid");
    else if (std::isfinite(o.eta))
        etas = {o.eta};
    require(!etas.empty(), "scan: --eta-grid is empty (provide 'lo:hi:count' or a comma list)");
    auto eps_targets = parse_list(o.eps, "eps");
    Report rep(o, "scan");
    auto basis = SectorBasis::build(sector_from(o, kind_from(o)));

    const bool target_mode = !eps_targets.empty();
    const bool with_gfds = !o.no_gfd;

    struct PerEta {
        EtaScan scan;
        DosHistogram dos;
        EdgeworthModel edge;
        bool have_fit = false;
        double ise_gauss = 0, ise_edge = 0;
        std::vector<TargetRow> targets;
    };
    std::vector<PerEta> results(etas.size());

    parallel_for(static_cast<int>(etas.size()), o.threads, [&](int i) {
        BhhParams p = BhhParams::from_eta(etas[i], o.n, o.l,
                                          o.bc == "pbc" ? Bc::pbc : Bc::hwbc,
                                          o.basis == "tunneling" ? BasisKind::tunneling
                                                                 : BasisKind::interaction);
        auto H = build_bhh(p, basis);
        PerEta& out = results[i];
        if (target_mode) {
            for (double t : eps_targets) {
                auto s = diagonalize_window(H, t, o.k_states, o.dense_cap);
                if (out.dos.counts.empty()) {
                    out.dos = dos_histogram(s, o.bins);
                    out.scan = scan_spectrum(etas[i], s, o.bins, false);
                }
                std::vector<double> d1, d2, dinf;
                for (std::int64_t k = s.vec_offset; k < s.vec_offset + s.vec_count; ++k) {
                    auto v = s.vector(k);
                    d1.push_back(gfd(v, 1.0, s.dim));
                    d2.push_back(gfd(v, 2.0, s.dim));
                    dinf.push_back(gfd(v, kQInf, s.dim));
                }
                out.targets.push_back(
                    {etas[i], t, moment_stats(d1), moment_stats(d2), moment_stats(dinf)});
            }
        } else {
            auto s = full_diagonalize(H, with_gfds, o.dense_cap);
            out.scan = scan_spectrum(etas[i], s, o.bins, with_gfds);
            out.dos = dos_histogram(s, o.bins);
            if (s.dim >= 50) {
                auto em = edgeworth_fit(s.eps);
                out.edge = em;
                out.have_fit = true;
                HistogramDensity hd;
                hd.n_samples = s.dim;
                hd.edges = out.dos.bin_edges;
                hd.density.resize(o.bins);
                for (int b = 0; b < o.bins; ++b)
                    hd.density[b] = out.dos.counts[b] * static_cast<double>(o.bins) / s.dim;
                auto ms = moment_stats(s.eps);
                out.ise_gauss = integrated_squared_error(
                    hd, [&](double x) { return gaussian_pdf(x, ms.mean, std::sqrt(ms.var)); });
                out.ise_edge = integrated_squared_error(hd, [&](double x) { return em(x); });
            }
        }
    });

    {
        auto f = rep.csv("scan_grid.csv");
        f << "eta,eps_bin_center,quantifier,value,stderr,count\n";
        for (std::size_t i = 0; i < etas.size(); ++i) write_grid_rows(f, etas[i], results[i].scan);
    }
    {
        auto f = rep.csv("inner_r.csv");
        f << "eta,percent,mean_r,degenerate_excluded\n";
        for (std::size_t i = 0; i < etas.size(); ++i)
            for (std::size_t pi = 0; pi < 4; ++pi)
                f << format_double(etas[i]) << ',' << results[i].scan.inner_percent[pi] << ','
                  << format_double(results[i].scan.inner_r[pi]) << ','
                  << results[i].scan.degenerate_excluded << "\n";
    }
    {
        auto f = rep.csv("dos.csv");
        f << "eta,bin,eps_center,count\n";
        for (std::size_t i = 0; i < etas.size(); ++i)
            for (int b = 0; b < o.bins; ++b)
                f << format_double(etas[i]) << ',' << b << ','
                  << format_double((b + 0.5) / o.bins) << ',' << results[i].dos.counts[b] << "\n";
    }
    if (!target_mode) {
        auto f = rep.csv("dos_fit.csv");
        f << "eta,eps_star,mu,sigma,gamma1,gamma2,ise_gauss,ise_edgeworth\n";
        for (std::size_t i = 0; i < etas.size(); ++i) {
            const auto& r = results[i];
            f << format_double(etas[i]) << ',' << format_double(r.dos.eps_star) << ',';
            if (r.have_fit)
                f << format_double(r.edge.mu) << ',' << format_double(r.edge.sigma) << ','
                  << format_double(r.edge.gamma1) << ',' << format_double(r.edge.gamma2) << ','
                  << format_double(r.ise_gauss) << ',' << format_double(r.ise_edge);
            else
                f << ",,,,,";
            f << "\n";
        }
    } else {
        auto f = rep.csv("target_stats.csv");
        f << "eta,eps_target,n_states,d1_mean,d1_var,d1_skew,d1_stderr,d2_mean,d2_var,d2_skew,"
             "dinf_mean,dinf_var,dinf_skew,eps_star\n";
        for (std::size_t i = 0; i < etas.size(); ++i)
            for (const auto& t : results[i].targets)
                f << format_double(t.x) << ',' << format_double(t.eps_target) << ',' << t.d1.count
                  << ',' << format_double(t.d1.mean) << ',' << format_double(t.d1.var) << ','
                  << fmt_opt(t.d1.skew) << ',' << format_double(t.d1.stderr_mean) << ','
                  << format_double(t.d2.mean) << ',' << format_double(t.d2.var) << ','
                  << fmt_opt(t.d2.skew) << ',' << format_double(t.dinf.mean) << ','
                  << format_double(t.dinf.var) << ',' << fmt_opt(t.dinf.skew) << ','
                  << format_double(results[i].dos.eps_star) << "\n";
    }
    return 0;
}

int run_egoe_scan(const Options& o) {
    require(o.n >= 1 && o.l >= 1, "egoe-scan: --n and --l are required");
    require(o.realizations >= 1, "egoe-scan: --realizations must be >= 1");
    auto eps_targets = parse_list(o.eps, "eps");
    Report rep(o, "egoe-scan");
    auto basis = SectorBasis::build(egoe_sector(o));
    const bool target_mode = !eps_targets.empty();
    const bool with_gfds = !o.no_gfd;

    struct PerReal {
        EtaScan scan;
        std::vector<std::int64_t> dos_counts;
        std::vector<TargetRow> targets;
    };
    std::vector<PerReal> res(o.realizations);

    parallel_for(o.realizations, o.threads, [&](int r) {
        EgoeParams p;
        p.N = o.n;
        p.L = o.l;
        p.lambda = o.lambda;
        p.reflection_symmetric = basis.spec().parity.has_value();
        p.seed = o.seed;
        p.realization = static_cast<std::uint64_t>(r);
        auto H = sample_egoe(p, basis);
        if (target_mode) {
            for (double t : eps_targets) {
                auto s = diagonalize_window(H, t, o.k_states, o.dense_cap);
                if (res[r].dos_counts.empty()) {
                    res[r].dos_counts = dos_histogram(s, o.bins).counts;
                    res[r].scan = scan_spectrum(o.lambda, s, o.bins, false);
                }
                std::vector<double> d1, d2, dinf;
                for (std::int64_t k = s.vec_offset; k < s.vec_offset + s.vec_count; ++k) {
                    auto v = s.vector(k);
                    d1.push_back(gfd(v, 1.0, s.dim));
                    d2.push_back(gfd(v, 2.0, s.dim));
                    dinf.push_back(gfd(v, kQInf, s.dim));
                }
                res[r].targets.push_back(
                    {o.lambda, t, moment_stats(d1), moment_stats(d2), moment_stats(dinf)});
            }
        } else {
            auto s = full_diagonalize(H, with_gfds, o.dense_cap);
            res[r].scan = scan_spectrum(o.lambda, s, o.bins, with_gfds);
            res[r].dos_counts = dos_histogram(s, o.bins).counts;
        }
    });

    // ensemble aggregation per bin: mean over realizations that define the
    // cell, with the spread over realizations as the error bar
    auto f = rep.csv("egoe_grid.csv");
    f << "# parity_block: " << basis.spec().label() << "\n";
    f << "lambda,eps_bin_center,quantifier,value,stderr,realizations,count\n";
    using OptPair = std::optional<std::pair<double, std::int64_t>>;
    auto emit = [&](int b, const char* name, const std::function<OptPair(const ScanCell&)>& extract) {
        std::vector<double> vals;
        std::int64_t count = 0;
        for (const auto& pr : res) {
            auto v = extract(pr.scan.cells[b]);
            if (v) {
                vals.push_back(v->first);
                count += v->second;
            }
        }
        if (vals.empty()) return;
        auto ms = moment_stats(vals);
        f << format_double(o.lambda) << ',' << format_double((b + 0.5) / o.bins) << ',' << name
          << ',' << format_double(ms.mean) << ',' << format_double(ms.stderr_mean) << ','
          << vals.size() << ',' << count << "\n";
    };
    for (int b = 0; b < o.bins; ++b) {
        emit(b, "r_mean", [](const ScanCell& c) -> OptPair {
            if (!c.mean_r) return std::nullopt;
            return std::pair{*c.mean_r, c.n_r};
        });
        emit(b, "d1_mean", [](const ScanCell& c) -> OptPair {
            if (!c.d1) return std::nullopt;
            return std::pair{c.d1->mean, c.d1->count};
        });
        emit(b, "d1_var", [](const ScanCell& c) -> OptPair {
            if (!c.d1) return std::nullopt;
            return std::pair{c.d1->var, c.d1->count};
        });
        emit(b, "d1_skew", [](const ScanCell& c) -> OptPair {
            if (!c.d1 || !c.d1->skew) return std::nullopt;
            return std::pair{*c.d1->skew, c.d1->count};
        });
        emit(b, "d2_mean", [](const ScanCell& c) -> OptPair {
            if (!c.d2) return std::nullopt;
            return std::pair{c.d2->mean, c.d2->count};
        });
        emit(b, "d2_var", [](const ScanCell& c) -> OptPair {
            if (!c.d2) return std::nullopt;
            return std::pair{c.d2->var, c.d2->count};
        });
        emit(b, "dinf_mean", [](const ScanCell& c) -> OptPair {
            if (!c.dinf) return std::nullopt;
            return std::pair{c.dinf->mean, c.dinf->count};
        });
        emit(b, "dinf_var", [](const ScanCell& c) -> OptPair {
            if (!c.dinf) return std::nullopt;
            return std::pair{c.dinf->var, c.dinf->count};
        });
    }
    {
        auto g = rep.csv("egoe_dos.csv");
        g << "bin,eps_center,mean_count\n";
        for (int b = 0; b < o.bins; ++b) {
            double acc = 0;
            int nr = 0;
            for (const auto& pr : res)
                if (!pr.dos_counts.empty()) {
                    acc += pr.dos_counts[b];
                    ++nr;
                }
            g << b << ',' << format_double((b + 0.5) / o.bins) << ','
              << format_double(nr ? acc / nr : 0.0) << "\n";
        }
    }
    {
        auto g = rep.csv("egoe_inner_r.csv");
        g << "lambda,percent,mean_r,stderr\n";
        for (std::size_t pi = 0; pi < 4; ++pi) {
            std::vector<double> vals;
            for (const auto& pr : res)
                if (!std::isnan(pr.scan.inner_r[pi])) vals.push_back(pr.scan.inner_r[pi]);
            if (vals.empty()) continue;
            auto ms = moment_stats(vals);
            g << format_double(o.lambda) << ',' << res[0].scan.inner_percent[pi] << ','
              << format_double(ms.mean) << ',' << format_double(ms.stderr_mean) << "\n";
        }
    }
    if (target_mode) {
        auto g = rep.csv("egoe_target_stats.csv");
        g << "lambda,eps_target,realizations,n_states,d1_mean,d1_mean_stderr,d1_var,"
             "d1_var_stderr,dinf_mean,dinf_mean_stderr\n";
        for (std::size_t t = 0; t < eps_targets.size(); ++t) {
            std::vector<double> m1, v1, mi;
            std::int64_t n_states = 0;
            for (const auto& pr : res) {
                m1.push_back(pr.targets[t].d1.mean);
                v1.push_back(pr.targets[t].d1.var);
                mi.push_back(pr.targets[t].dinf.mean);
                n_states = pr.targets[t].d1.count;
            }
            auto sm = moment_stats(m1);
            auto sv = moment_stats(v1);
            auto si = moment_stats(mi);
            g << format_double(o.lambda) << ',' << format_double(eps_targets[t]) << ','
              << o.realizations << ',' << n_states << ',' << format_double(sm.mean) << ','
              << format_double(sm.stderr_mean) << ',' << format_double(sv.mean) << ','
              << format_double(sv.stderr_mean) << ',' << format_double(si.mean) << ','
              << format_double(si.stderr_mean) << "\n";
        }
    }
    return 0;
}

int run_lambda_scan(const Options& o) {
    require(o.n >= 1 && o.l >= 1, "lambda-scan: --n and --l are required");
    require(!o.lambda_grid.empty(), "lambda-scan: --lambda-grid is required");
    auto lambdas = parse_grid(o.lambda_grid, "lambda-grid");
    auto eps_targets = parse_list(o.eps, "eps");
    require(!eps_targets.empty(), "lambda-scan: --eps targets are required");
    Report rep(o, "lambda-scan");
    auto basis = SectorBasis::build(egoe_sector(o));

    struct Task {
        int il, r;
    };
    std::vector<Task> tasks;
    for (int il = 0; il < static_cast<int>(lambdas.size()); ++il)
        for (int r = 0; r < o.realizations; ++r) tasks.push_back({il, r});
    std::vector<std::vector<std::vector<std::pair<double, double>>>> raw(
        lambdas.size(), std::vector<std::vector<std::pair<double, double>>>(
                            o.realizations,
                            std::vector<std::pair<double, double>>(eps_targets.size())));

    parallel_for(static_cast<int>(tasks.size()), o.threads, [&](int ti) {
        auto [il, r] = tasks[ti];
        EgoeParams p;
        p.N = o.n;
        p.L = o.l;
        p.lambda = lambdas[il];
        p.reflection_symmetric = basis.spec().parity.has_value();
        p.seed = o.seed;
        p.realization = static_cast<std::uint64_t>(r);
        auto H = sample_egoe(p, basis);
        for (std::size_t t = 0; t < eps_targets.size(); ++t) {
            auto s = diagonalize_window(H, eps_targets[t], o.k_states, o.dense_cap);
            std::vector<double> d1;
            for (std::int64_t k = s.vec_offset; k < s.vec_offset + s.vec_count; ++k)
                d1.push_back(gfd(s.vector(k), 1.0, s.dim));
            auto ms = moment_stats(d1);
            raw[il][r][t] = {ms.mean, ms.var};
        }
    });

    auto f = rep.csv("lambda_scan.csv");
    f << "lambda,eps_target,realizations,d1_mean,d1_mean_stderr,d1_var,d1_var_stderr\n";
    for (std::size_t il = 0; il < lambdas.size(); ++il)
        for (std::size_t t = 0; t < eps_targets.size(); ++t) {
            std::vector<double> means, vars;
            for (int r = 0; r < o.realizations; ++r) {
                means.push_back(raw[il][r][t].first);
                vars.push_back(raw[il][r][t].second);
            }
            auto sm = moment_stats(means);
            auto sv = moment_stats(vars);
            f << format_double(lambdas[il]) << ',' << format_double(eps_targets[t]) << ','
              << o.realizations << ',' << format_double(sm.mean) << ','
              << format_double(sm.stderr_mean) << ',' << format_double(sv.mean) << ','
              << format_double(sv.stderr_mean) << "\n";
        }
    return 0;
}

struct PooledSamples {
    std::vector<double> d1, d2, dinf;
};

json distance_entry(const DistanceReport& r, const HistogramDensity& hist) {
    return json{{"pair", r.pair}, {"q", r.q},           {"d_q", r.d_q},
                {"kl", r.kl},     {"n_samples", r.n_samples}, {"bins", hist.bins()}};
}

int run_compare(const Options& o) {
    require(o.n >= 1 && o.l >= 1, "compare: --n and --l are required");
    std::vector<double> etas = o.eta_grid.empty()
                                   ? std::vector<double>{0.25, 0.2825, 0.315, 0.3475, 0.38}
                                   : parse_grid(o.eta_grid, "eta-grid");
    require(!etas.empty(), "compare: --eta-grid is empty");
    double eps_bhh = 0.5;
    if (!o.eps.empty()) {
        auto t = parse_list(o.eps, "eps");
        require(t.size() == 1, "compare: exactly one --eps target");
        eps_bhh = t[0];
    }
    Report rep(o, "compare");

    auto basis = SectorBasis::build(sector_from(o, kind_from(o)));
    const std::int64_t dim = basis.dim();

    // BHH pooled samples over the eta set, k states nearest the target
    PooledSamples bhh;
    std::map<double, double> eps_star_curve;
    std::vector<std::vector<double>> bhh_eps_per_eta(etas.size());
    {
        std::vector<PooledSamples> per(etas.size());
        std::vector<double> stars(etas.size());
        parallel_for(static_cast<int>(etas.size()), o.threads, [&](int i) {
            BhhParams p = BhhParams::from_eta(etas[i], o.n, o.l,
                                              o.bc == "pbc" ? Bc::pbc : Bc::hwbc,
                                              o.basis == "tunneling" ? BasisKind::tunneling
                                                                     : BasisKind::interaction);
            auto s = diagonalize_window(build_bhh(p, basis), eps_bhh, o.k_states, o.dense_cap);
            stars[i] = dos_histogram(s, o.bins).eps_star;
            bhh_eps_per_eta[i] = s.eps;
            for (std::int64_t k = s.vec_offset; k < s.vec_offset + s.vec_count; ++k) {
                auto v = s.vector(k);
                per[i].d1.push_back(gfd(v, 1.0, s.dim));
                per[i].d2.push_back(gfd(v, 2.0, s.dim));
                per[i].dinf.push_back(gfd(v, kQInf, s.dim));
            }
        });
        for (std::size_t i = 0; i < etas.size(); ++i) {
            eps_star_curve[etas[i]] = stars[i];
            bhh.d1.insert(bhh.d1.end(), per[i].d1.begin(), per[i].d1.end());
            bhh.d2.insert(bhh.d2.end(), per[i].d2.begin(), per[i].d2.end());
            bhh.dinf.insert(bhh.dinf.end(), per[i].dinf.begin(), per[i].dinf.end());
        }
    }

    // EGOE pooled samples at the ensemble bulk centre
    const double eps_egoe = 0.5;
    PooledSamples egoe;
    std::vector<double> egoe_real_mean_d1(o.realizations);
    std::vector<double> egoe_first_eps;
    {
        std::vector<PooledSamples> per(o.realizations);
        std::vector<std::vector<double>> eps0(o.realizations);
        auto egoe_basis = SectorBasis::build(egoe_sector(o));
        parallel_for(o.realizations, o.threads, [&](int r) {
            EgoeParams p;
            p.N = o.n;
            p.L = o.l;
            p.lambda = o.lambda;
            p.reflection_symmetric = egoe_basis.spec().parity.has_value();
            p.seed = o.seed;
            p.realization = static_cast<std::uint64_t>(r);
            auto H = sample_egoe(p, egoe_basis);
            auto s = diagonalize_window(H, eps_egoe, o.k_states, o.dense_cap);
            if (r == 0) eps0[0] = s.eps;
            double acc = 0;
            for (std::int64_t k = s.vec_offset; k < s.vec_offset + s.vec_count; ++k) {
                auto v = s.vector(k);
                double d1 = gfd(v, 1.0, s.dim);
                per[r].d1.push_back(d1);
                per[r].d2.push_back(gfd(v, 2.0, s.dim));
                per[r].dinf.push_back(gfd(v, kQInf, s.dim));
                acc += d1;
            }
            egoe_real_mean_d1[r] = acc / s.vec_count;
        });
        for (int r = 0; r < o.realizations; ++r) {
            egoe.d1.insert(egoe.d1.end(), per[r].d1.begin(), per[r].d1.end());
            egoe.d2.insert(egoe.d2.end(), per[r].d2.begin(), per[r].d2.end());
            egoe.dinf.insert(egoe.dinf.end(), per[r].dinf.begin(), per[r].dinf.end());
        }
        egoe_first_eps = std::move(eps0[0]);
    }

    // energy correspondence table, both methods
    {
        auto f = rep.csv("eps_map.csv");
        f << "eta,eps_bhh,eps_star_bhh,eps_egoe_bulk_centre,eps_egoe_percentile\n";
        for (std::size_t i = 0; i < etas.size(); ++i) {
            double m1 = eps_egoe_map(eps_bhh, etas[i], eps_star_curve);
            double m2 = eps_egoe_percentile(eps_bhh, bhh_eps_per_eta[i], egoe_first_eps);
            f << format_double(etas[i]) << ',' << format_double(eps_bhh) << ','
              << format_double(eps_star_curve[etas[i]]) << ',' << format_double(m1) << ','
              << format_double(m2) << "\n";
        }
    }

    auto goe1 = goe_d1_stats(dim);
    auto goe2 = goe_d2_stats(dim);
    auto goinf = goe_dinf_stats(dim);

    json report;
    report["dim"] = dim;
    report["sector"] = basis.spec().label();
    report["eps_bhh"] = eps_bhh;
    report["eps_egoe"] = eps_egoe;
    report["eta_pool"] = etas;
    report["distances"] = json::array();

    auto hist_and_write = [&](const std::vector<double>& xs, const std::string& name) {
        auto h = histogram_density(xs);
        auto f = rep.csv("hist_" + name + ".csv");
        f << "lo,hi,density\n";
        for (int b = 0; b < h.bins(); ++b)
            f << format_double(h.edges[b]) << ',' << format_double(h.edges[b + 1]) << ','
              << format_double(h.density[b]) << "\n";
        return h;
    };

    struct QCase {
        const char* label;
        const std::vector<double>&bhh_xs, &egoe_xs;
        double goe_mean;
        std::function<double(double)> goe_pdf;
    };
    std::vector<QCase> cases{
        {"1", bhh.d1, egoe.d1, goe1.mean,
         [&](double x) { return gaussian_pdf(x, goe1.mean, std::sqrt(goe1.var)); }},
        {"2", bhh.d2, egoe.d2, goe2.mean,
         [&](double x) { return gaussian_pdf(x, goe2.mean, std::sqrt(goe2.var)); }},
        {"inf", bhh.dinf, egoe.dinf, goinf.mean,
         [&](double x) { return goe_dinf_pdf(std::max(x, 1e-6), dim); }},
    };
    for (const auto& c : cases) {
        auto mb = moment_stats(c.bhh_xs);
        auto me = moment_stats(c.egoe_xs);
        auto hb = hist_and_write(c.bhh_xs, std::string("bhh_q") + c.label);
        auto he = hist_and_write(c.egoe_xs, std::string("egoe_q") + c.label);
        DistanceReport goe_bhh{"goe-bhh", c.label, d_q_distance(c.goe_mean, mb.mean, mb.var),
                               kl_divergence(hb, c.goe_pdf), mb.count};
        DistanceReport egoe_bhh{"egoe-bhh", c.label, d_q_distance(me.mean, mb.mean, mb.var),
                                kl_divergence(hb, [&](double x) { return he.value_at(x); }),
                                mb.count};
        DistanceReport goe_egoe{"goe-egoe", c.label, d_q_distance(c.goe_mean, me.mean, me.var),
                                kl_divergence(he, c.goe_pdf), me.count};
        report["distances"].push_back(distance_entry(goe_bhh, hb));
        report["distances"].push_back(distance_entry(egoe_bhh, hb));
        report["distances"].push_back(distance_entry(goe_egoe, he));
    }
    report["bhh_moments"] = {
        {"d1", {{"mean", moment_stats(bhh.d1).mean}, {"var", moment_stats(bhh.d1).var}}},
        {"d2", {{"mean", moment_stats(bhh.d2).mean}, {"var", moment_stats(bhh.d2).var}}},
        {"dinf", {{"mean", moment_stats(bhh.dinf).mean}, {"var", moment_stats(bhh.dinf).var}}}};
    report["egoe_moments"] = {
        {"d1", {{"mean", moment_stats(egoe.d1).mean}, {"var", moment_stats(egoe.d1).var}}},
        {"d2", {{"mean", moment_stats(egoe.d2).mean}, {"var", moment_stats(egoe.d2).var}}},
        {"dinf",
         {{"mean", moment_stats(egoe.dinf).mean}, {"var", moment_stats(egoe.dinf).var}}}};
    report["egoe_realization_mean_d1_stderr"] = moment_stats(egoe_real_mean_d1).stderr_mean;
    report["goe_baseline"] = {{"d1_mean", goe1.mean},
                              {"d1_var", goe1.var},
                              {"d2_mean", goe2.mean},
                              {"d2_var", goe2.var},
                              {"dinf_mean", goinf.mean},
                              {"dinf_var", goinf.var}};
    rep.write_json("compare_report.json", report);
    return 0;
}

int run_baselines(const Options& o) {
    require(!o.dims.empty(), "baselines: --dims is required (comma list of dimensions)");
    Report rep(o, "baselines");
    auto f = rep.csv("baselines.csv");
    f << "dim,quantity,value\n";
    for (double dv : parse_list(o.dims, "dims")) {
        std::int64_t d = static_cast<std::int64_t>(dv);
        auto b = goe_baseline(d);
        auto row = [&](const char* name, double v) {
            f << d << ',' << name << ',' << format_double(v) << "\n";
        };
        row("d1_mean", b.mean_d1);
        row("d1_var", b.var_d1);
        row("d2_tilde", b.d2_tilde);
        row("d2_var", b.var_d2);
        row("dinf_moment1", b.dinf_moments.at(1));
        row("dinf_moment2", b.dinf_moments.at(2));
        row("dinf_var", b.dinf_moments.at(2) - b.dinf_moments.at(1) * b.dinf_moments.at(1));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bose-Hubbard / embedded-ensemble chaos analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("bhchaos ") + kVersion);

    Options o;
    auto* c_basis = app.add_subcommand("basis", "sector dimensions and basis exports");
    c_basis->add_flag("--export-basis", o.export_basis, "write per-sector basis CSV files");
    auto* c_spec = app.add_subcommand("spectrum", "diagonalize one Hamiltonian");
    c_spec->add_option("--model", o.model, "bhh or egoe")->check(CLI::IsMember({"bhh", "egoe"}));
    c_spec->add_flag("--export-matrix", o.export_matrix, "write the assembled matrix");
    c_spec->add_flag("--gfd", o.gfd, "write per-eigenstate fractal dimensions");
    c_spec->add_flag("--export-vectors", o.export_vectors,
                     "write the stored eigenvectors as a binary dump");
    c_spec->add_option("--extra-q", o.extra_q, "additional finite q values, comma list");
    auto* c_scan = app.add_subcommand("scan", "eta scan of spectral and eigenvector statistics");
    c_scan->add_flag("--no-gfd", o.no_gfd, "skip eigenvectors (spacing statistics only)");
    auto* c_egoe = app.add_subcommand("egoe-scan", "ensemble-averaged embedded-ensemble scan");
    c_egoe->add_flag("--no-gfd", o.no_gfd, "skip eigenvectors (spacing statistics only)");
    auto* c_lambda = app.add_subcommand("lambda-scan", "embedded ensemble against lambda");
    c_lambda->add_option("--lambda-grid", o.lambda_grid, "lambda grid 'lo:hi:count' or list");
    auto* c_cmp = app.add_subcommand("compare", "distribution distances between the models");
    auto* c_base = app.add_subcommand("baselines", "analytic GOE baseline tables");
    c_base->add_option("--dims", o.dims, "Hilbert space dimensions, comma list");

    for (auto* c : {c_basis, c_spec, c_scan, c_egoe, c_lambda, c_cmp, c_base}) add_common(c, o);

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = apply_config_file(args);
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    if (o.threads > 1) setenv("OPENBLAS_NUM_THREADS", "1", 0);

    try {
        if (app.got_subcommand(c_basis)) return run_basis(o);
        if (app.got_subcommand(c_spec)) return run_spectrum(o);
        if (app.got_subcommand(c_scan)) return run_scan(o);
        if (app.got_subcommand(c_egoe)) return run_egoe_scan(o);
        if (app.got_subcommand(c_lambda)) return run_lambda_scan(o);
        if (app.got_subcommand(c_cmp)) return run_compare(o);
        if (app.got_subcommand(c_base)) return run_baselines(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#include "mlin/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mlin {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void save_lattice_set(std::ostream& os, const LatticeSet& s) {
    for (const auto& p : s.points()) {
        for (int j = 0; j < s.m(); ++j) {
            if (j) os << ' ';
            for (int a = 0; a < s.n(); ++a) {
                if (a) os << ',';
                os << p.coords[j * s.n() + a];
            }
        }
        os << '\n';
    }
}

LatticeSet load_lattice_set(std::istream& is, int n, int m) {
    std::vector<LatticePoint> pts;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        LatticePoint p;
        std::istringstream ls(line);
        std::string blk;
        while (ls >> blk) {
            std::istringstream bs(blk);
            std::string num;
            while (std::getline(bs, num, ',')) p.coords.push_back(std::stoi(num));
        }
        if (static_cast<int>(p.coords.size()) != n * m)
            throw std::invalid_argument("lattice set line has wrong shape: " + line);
        pts.push_back(std::move(p));
    }
    return LatticeSet(n, m, std::move(pts));
}

void save_column_split_csv(std::ostream& os, const ColumnSplit& cs) {
    os << "part_index,size,projection_bound,projection_actual\n";
    const int m = static_cast<int>(cs.parts.size());
    for (int j = 1; j <= m; ++j) {
        const LatticeSet& part = cs.parts[j - 1];
        double bound, actual;
        if (j < m) {
            bound = static_cast<double>(cs.budget) / cs.thresholds[j - 1];
            std::vector<int> dropped;
            for (int a = 1; a <= j; ++a) dropped.push_back(a);
            actual = part.empty() ? 0.0
                                  : static_cast<double>(project_drop(part, dropped).size());
        } else {
            // final part: certified quantity is the maximal column size over
            // the first m-1 axes
            bound = cs.thresholds.empty() ? static_cast<double>(cs.budget)
                                          : cs.thresholds[m - 2];
            std::size_t worst = 0;
            const int n = part.n();
            std::map<std::vector<int>, std::size_t> sizes;
            for (const auto& p : part.points()) {
                std::vector<int> key(p.coords.begin() + (m - 1) * n, p.coords.end());
                worst = std::max(worst, ++sizes[key]);
            }
            actual = static_cast<double>(worst);
        }
        os << j << ',' << part.size() << ',' << format_double(bound) << ','
           << format_double(actual) << '\n';
    }
}

void save_coefficient_table_csv(std::ostream& os, const CoefficientTable& t, double threshold) {
    os << "lambda,G,k,re,im\n";
    for (const auto& s : t.slices) {
        std::vector<long> k(s.klo);
        for (std::size_t flat = 0; flat < s.coeff.size(); ++flat) {
            const cplx v = s.coeff[flat];
            if (std::abs(v) > threshold) {
                os << s.lambda << ',' << s.letters << ',';
                for (std::size_t a = 0; a < k.size(); ++a) {
                    if (a) os << ' ';
                    os << k[a];
                }
                os << ',' << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
            }
            for (int a = static_cast<int>(k.size()) - 1; a >= 0; --a) {
                if (++k[a] < s.khi[a]) break;
                k[a] = s.klo[a];
            }
        }
    }
}

void save_mother_wavelets(std::ostream& os, const MotherWavelets& w) {
    os << "M " << w.M << " J " << w.J << " C0 " << format_double(w.C0) << '\n';
    os << "father " << w.table('F').size() << '\n';
    for (double v : w.table('F')) os << format_double(v) << '\n';
    os << "mother " << w.table('M').size() << '\n';
    for (double v : w.table('M')) os << format_double(v) << '\n';
}

void save_grid_text(std::ostream& os, int n, int m, int G, double L,
                    std::span<const cplx> values) {
    os << n << ' ' << m << ' ' << G << ' ' << format_double(L) << '\n';
    for (const auto& v : values)
        os << format_double(v.real()) << ' ' << format_double(v.imag()) << '\n';
}

namespace {

std::vector<cplx> load_grid_values(std::istream& is, std::size_t count) {
    std::vector<cplx> vals;
    vals.reserve(count);
    double re, im;
    while (vals.size() < count && (is >> re >> im)) vals.emplace_back(re, im);
    if (vals.size() != count) throw std::invalid_argument("grid text: truncated sample list");
    return vals;
}

} // namespace

GridFunction load_grid_function(std::istream& is) {
    int n, m, G;
    double L;
    if (!(is >> n >> m >> G >> L)) throw std::invalid_argument("grid text: bad header");
    if (m != 1) throw std::invalid_argument("grid text: expected m = 1 for a GridFunction");
    TorusGrid g{n, L, G};
    g.validate();
    return GridFunction(g, load_grid_values(is, g.size()));
}

DenseSymbol load_dense_symbol(std::istream& is) {
    int n, m, G;
    double L;
    if (!(is >> n >> m >> G >> L)) throw std::invalid_argument("grid text: bad header");
    TorusGrid g{n, L, G};
    g.validate();
    DenseSymbol s{g, m, {}};
    s.values = load_grid_values(is, s.size());
    return s;
}

void save_sphere_function(std::ostream& os, const SphereFunction& s) {
    os << s.mn << ' ' << format_double(s.q) << '\n';
    const int per = s.mn == 2 ? 1 : 2;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        for (int a = 0; a < per; ++a) os << format_double(s.angles[i * per + a]) << ' ';
        os << format_double(s.values[i]) << '\n';
    }
}

void save_scaling_csv(std::ostream& os, const ScalingReport& rep) {
    os << "parameter,estimate,envelope,ratio\n";
    for (std::size_t i = 0; i < rep.params.size(); ++i) {
        os << format_double(rep.params[i]) << ',' << format_double(rep.estimates[i]) << ','
           << format_double(rep.envelopes[i]) << ',' << format_double(rep.ratios[i]) << '\n';
    }
}

std::string scaling_json(const ScalingReport& rep) {
    nlohmann::json j;
    j["parameter"] = rep.parameter;
    j["slope"] = rep.fit.slope;
    j["intercept"] = rep.fit.intercept;
    j["rms_residual"] = rep.fit.rms_residual;
    j["ratio_max"] = rep.ratio_max;
    j["ratio_min"] = rep.ratio_min;
    j["seed"] = rep.seed;
    return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << contents;
}

std::string slurp_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace mlin

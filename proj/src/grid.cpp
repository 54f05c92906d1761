#include "irgnm/grid.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

namespace irgnm {

void write_csv(std::ostream& os, const GridFn& f)
{
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    os << "x,value\n";
    for (Eigen::Index i = 0; i < f.size(); ++i) os << f.grid().node(i) << ',' << f[i] << '\n';
}

void write_csv(const std::string& path, const GridFn& f)
{
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::io, "cannot open " + path + " for writing");
    write_csv(os, f);
}

GridFn read_grid_fn_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::io, "cannot open " + path);
    std::string line;
    if (!std::getline(is, line) || line.rfind("x,value", 0) != 0)
        throw Error(ErrorKind::parse, path + ": expected header 'x,value'");
    std::vector<double> xs, vs;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::istringstream ss(line);
        double x = 0, v = 0;
        char comma = 0;
        if (!(ss >> x >> comma >> v) || comma != ',')
            throw Error(ErrorKind::parse, path + ":" + std::to_string(lineno) + ": malformed row");
        xs.push_back(x);
        vs.push_back(v);
    }
    if (xs.size() < 2) throw Error(ErrorKind::parse, path + ": need at least 2 rows");
    Grid1D grid(static_cast<Eigen::Index>(xs.size()), xs.front(), xs.back());
    const double tol = 1e-9 * (grid.hi() - grid.lo());
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (std::abs(xs[i] - grid.node(static_cast<Eigen::Index>(i))) > tol)
            throw Error(ErrorKind::parse, path + ": nodes are not uniformly spaced");
    return GridFn(grid, Eigen::Map<const Vector>(vs.data(), static_cast<Eigen::Index>(vs.size())));
}

} // namespace irgnm

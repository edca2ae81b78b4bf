#include "gsf/trajectory_io.hpp"

#include "gsf/csv.hpp"
#include "gsf/error.hpp"

#include <fstream>
#include <ostream>

namespace gsf {
namespace {

struct Layout {
    bool truth = false;
    bool labels = false;
    std::size_t columns = 3;
};

Layout parse_header(const std::string& line, std::size_t line_no) {
    const auto fields = csv::split(line);
    Layout layout;
    const auto expect = [&](std::size_t at, std::string_view name) {
        return at < fields.size() && fields[at] == name;
    };
    if (!expect(0, "step") || !expect(1, "dt") || !expect(2, "z")) {
        throw SchemaError("header must start with step,dt,z", line_no);
    }
    std::size_t at = 3;
    if (expect(at, "x_pos")) {
        if (!expect(at + 1, "x_vel")) {
            throw SchemaError("x_pos must be followed by x_vel", line_no);
        }
        layout.truth = true;
        at += 2;
    }
    if (expect(at, "active_v")) {
        if (!expect(at + 1, "active_w")) {
            throw SchemaError("active_v must be followed by active_w", line_no);
        }
        layout.labels = true;
        at += 2;
    }
    if (at != fields.size()) {
        throw SchemaError("unexpected column '" + std::string(fields[at]) + "'", line_no);
    }
    layout.columns = at;
    return layout;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory,
                          const std::vector<std::string>& comments) {
    trajectory.validate();
    for (const auto& c : comments) {
        out << "# " << c << '\n';
    }
    const bool truth = trajectory.has_truth();
    const bool labels = trajectory.has_labels();
    out << "step,dt,z";
    if (truth) {
        out << ",x_pos,x_vel";
    }
    if (labels) {
        out << ",active_v,active_w";
    }
    out << '\n';
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        const VectorXd& z = trajectory.measurements[k];
        if (z.size() != 1) {
            throw InvalidArgument("write_trajectory_csv: measurements must be scalar");
        }
        out << (k + 1) << ',' << csv::format_double(trajectory.grid.dt(k)) << ','
            << csv::format_double(z[0]);
        if (truth) {
            const VectorXd& x = trajectory.states[k];
            if (x.size() != 2) {
                throw InvalidArgument("write_trajectory_csv: states must be [position, velocity]");
            }
            out << ',' << csv::format_double(x[0]) << ',' << csv::format_double(x[1]);
        }
        if (labels) {
            out << ',' << trajectory.active_v[k] << ',' << trajectory.active_w[k];
        }
        out << '\n';
    }
}

Trajectory read_trajectory_csv(std::istream& in) {
    csv::LineReader reader(in);
    const auto header = reader.next();
    if (!header) {
        throw SchemaError("missing header", reader.line_number());
    }
    const Layout layout = parse_header(*header, reader.line_number());

    Trajectory t;
    std::vector<double> dts;
    while (const auto line = reader.next()) {
        const std::size_t line_no = reader.line_number();
        const auto fields = csv::split(*line);
        if (fields.size() != layout.columns) {
            throw SchemaError("expected " + std::to_string(layout.columns) + " fields, got " +
                                  std::to_string(fields.size()),
                              line_no);
        }
        const auto step = csv::parse_integer(fields[0]);
        if (!step || *step != static_cast<long long>(dts.size() + 1)) {
            throw SchemaError("step must count up from 1", line_no);
        }
        const auto dt = csv::parse_double(fields[1]);
        if (!dt) {
            throw SchemaError("dt is not a number", line_no);
        }
        if (!tick_multiple(*dt)) {
            throw SchemaError("dt not a multiple of 0.1080", line_no);
        }
        const auto z = csv::parse_double(fields[2]);
        if (!z) {
            throw SchemaError("z is not a number", line_no);
        }
        dts.push_back(*dt);
        t.measurements.push_back(VectorXd::Constant(1, *z));
        std::size_t at = 3;
        if (layout.truth) {
            const auto pos = csv::parse_double(fields[at]);
            const auto vel = csv::parse_double(fields[at + 1]);
            if (!pos || !vel) {
                throw SchemaError("x_pos/x_vel are not numbers", line_no);
            }
            t.states.push_back((VectorXd(2) << *pos, *vel).finished());
            at += 2;
        }
        if (layout.labels) {
            const auto v = csv::parse_integer(fields[at]);
            const auto w = csv::parse_integer(fields[at + 1]);
            if (!v || !w || *v < 0 || *w < 0) {
                throw SchemaError("active_v/active_w must be nonnegative integers", line_no);
            }
            t.active_v.push_back(static_cast<std::size_t>(*v));
            t.active_w.push_back(static_cast<std::size_t>(*w));
        }
    }
    if (dts.empty()) {
        throw SchemaError("no data rows", reader.line_number());
    }
    t.grid = TimeGrid(std::move(dts));
    return t;
}

Trajectory ingest_trajectory(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open trajectory file " + path.string());
    }
    return read_trajectory_csv(in);
}

}  // namespace gsf

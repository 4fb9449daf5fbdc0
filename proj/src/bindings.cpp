#include "chnsd/drivers.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace chnsd;

namespace {

/// Owns a problem plus stepper so python can drive the time loop.
class Simulation {
  public:
    explicit Simulation(const Config& cfg) : cfg_(cfg), problem_(make_problem(cfg, false)) {
        state_ = initial_state(cfg_, *problem_.spaces);
        if (cfg_.scheme.scheme == SchemeKind::decoupled)
            dec_ = std::make_unique<DecoupledStepper>(*problem_.spaces, cfg_.model, cfg_.scheme);
        else
            cpl_ = std::make_unique<CoupledStepper>(*problem_.spaces, cfg_.model, cfg_.scheme);
    }

    void step(int n = 1) {
        for (int i = 0; i < n; ++i) {
            prev_ = std::make_unique<SimState>(state_);
            state_ = dec_ ? dec_->advance(state_) : cpl_->advance(state_);
        }
    }

    double t() const { return state_.t; }
    Eigen::VectorXd phi() const { return state_.phi.coeffs; }
    Eigen::VectorXd w() const { return state_.w.coeffs; }
    Eigen::VectorXd velocity() const { return state_.u_c.coeffs; }
    Eigen::VectorXd p_c() const { return state_.p_c.coeffs; }
    Eigen::VectorXd p_m() const { return state_.p_m.coeffs; }
    double energy_value() const { return energy(state_, cfg_.model); }
    double modified_energy_value() const { return modified_energy(state_, cfg_.model, cfg_.scheme); }
    double dissipation_value() const {
        if (!prev_) return 0.0;
        return cfg_.scheme.scheme == SchemeKind::decoupled ? dissipation(*prev_, state_, cfg_.model, cfg_.scheme)
                                                           : dissipation_coupled(*prev_, state_, cfg_.model, cfg_.scheme);
    }
    double mass() const { return phase_mass(state_); }
    double div_u() const { return div_u_norm(state_); }
    const Mesh& mesh() const { return *problem_.mesh; }
    void write_snapshot(const std::string& path) const { write_vtk(state_, *problem_.mesh, path); }

  private:
    Config cfg_;
    Problem problem_;
    SimState state_;
    std::unique_ptr<SimState> prev_;
    std::unique_ptr<DecoupledStepper> dec_;
    std::unique_ptr<CoupledStepper> cpl_;
};

py::array_t<double> nodes_array(const Mesh& m) {
    py::array_t<double> out({m.n_nodes(), 2});
    auto r = out.mutable_unchecked<2>();
    for (int i = 0; i < m.n_nodes(); ++i) {
        r(i, 0) = m.nodes[i].x();
        r(i, 1) = m.nodes[i].y();
    }
    return out;
}

py::array_t<int> triangles_array(const Mesh& m) {
    py::array_t<int> out({m.n_triangles(), 3});
    auto r = out.mutable_unchecked<2>();
    for (int i = 0; i < m.n_triangles(); ++i)
        for (int k = 0; k < 3; ++k) r(i, k) = m.triangles[i][k];
    return out;
}

py::array_t<int> region_array(const Mesh& m) {
    py::array_t<int> out(m.n_triangles());
    auto r = out.mutable_unchecked<1>();
    for (int i = 0; i < m.n_triangles(); ++i) r(i) = m.region[i] == Region::conduit ? 0 : 1;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Phase-field two-phase flow in coupled free-flow and porous layers";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<SolverError>(m, "SolverError");
    py::register_exception<MeshError>(m, "MeshError");

    py::enum_<ConduitPosition>(m, "ConduitPosition")
        .value("bottom", ConduitPosition::bottom)
        .value("top", ConduitPosition::top);

    py::class_<DomainLayout>(m, "DomainLayout")
        .def(py::init<>())
        .def_readwrite("x_min", &DomainLayout::x_min)
        .def_readwrite("x_max", &DomainLayout::x_max)
        .def_readwrite("y_min", &DomainLayout::y_min)
        .def_readwrite("y_max", &DomainLayout::y_max)
        .def_readwrite("y_interface", &DomainLayout::y_interface)
        .def_readwrite("conduit_position", &DomainLayout::conduit_position);

    py::class_<Mesh>(m, "Mesh")
        .def_property_readonly("n_nodes", &Mesh::n_nodes)
        .def_property_readonly("n_triangles", &Mesh::n_triangles)
        .def_property_readonly("nodes", &nodes_array)
        .def_property_readonly("triangles", &triangles_array)
        .def_property_readonly("region", &region_array)
        .def_property_readonly("n_interface_edges", [](const Mesh& mm) { return (int)mm.interface_edges.size(); })
        .def("domain_area", &Mesh::domain_area);

    m.def("build_layered_mesh", &build_layered_mesh, py::arg("nx"), py::arg("ny"), py::arg("layout"));
    m.def("refine_uniform", &refine_uniform);

    m.def("mixture", py::vectorize([](double phi, double a1, double a2) { return mixture(phi, a1, a2); }));
    m.def("double_well_F", py::vectorize([](double phi, double eps) { return double_well_F(phi, eps); }));
    m.def("double_well_f", py::vectorize([](double phi, double eps) { return double_well_f(phi, eps); }));

    py::class_<Config>(m, "Config");
    m.def("parse_config", &parse_config, py::arg("text"));
    m.def("load_config", &load_config, py::arg("path"));
    m.def("run_experiment", [](const Config& cfg, const std::string& out) {
        Config c = cfg;
        if (!out.empty()) c.output.directory = out;
        run_experiment(c);
    }, py::arg("config"), py::arg("out_dir") = std::string());

    m.def("convergence_order", &convergence_order, py::arg("errors"), py::arg("steps"));

    py::class_<Simulation>(m, "Simulation")
        .def(py::init<const Config&>())
        .def("step", &Simulation::step, py::arg("n") = 1)
        .def_property_readonly("t", &Simulation::t)
        .def_property_readonly("mesh", &Simulation::mesh, py::return_value_policy::reference_internal)
        .def("phi", &Simulation::phi)
        .def("w", &Simulation::w)
        .def("velocity", &Simulation::velocity)
        .def("p_c", &Simulation::p_c)
        .def("p_m", &Simulation::p_m)
        .def("energy", &Simulation::energy_value)
        .def("modified_energy", &Simulation::modified_energy_value)
        .def("dissipation", &Simulation::dissipation_value)
        .def("phase_mass", &Simulation::mass)
        .def("div_u_norm", &Simulation::div_u)
        .def("write_snapshot", &Simulation::write_snapshot);
}

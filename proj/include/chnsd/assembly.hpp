#pragma once

#include "chnsd/fields.hpp"
#include "chnsd/quadrature.hpp"
#include "chnsd/sparse.hpp"

#include <functional>
#include <optional>

namespace chnsd {

/// Bilinear forms of the discrete system.
///
///   mass                (c u, v)
///   stiffness           (A grad u, grad v), tensor coefficient A
///   symmetric_gradient  (c D(u), D(v)) with D the symmetric gradient; c = 2 nu
///   divergence          (c q, div v)
///   convection          (c (a . grad) u, v)
///   div_advect          (c u, v) with c supplied as div(rho a) by the caller
///   grad_div            (c div u, div v)
///   interface_normal    <q, v . n_c> over the interface
///   interface_bjs       <c (u . tau), (v . tau)>, tau = (1, 0)
///   interface_scalar    <(1/2) (b . u), v . n_c> with b = rho a supplied on the edge
///   gradient_coupling   (c grad p, v): scalar trial against a vector test space
enum class OperatorKind {
    mass,
    stiffness,
    symmetric_gradient,
    divergence,
    convection,
    div_advect,
    grad_div,
    interface_normal,
    interface_bjs,
    interface_scalar,
    gradient_coupling,
};

/// Evaluation context at a domain quadrature point.
struct QuadCtx {
    int tri = -1;
    int qp = -1;
    std::array<double, 3> bary{};
    Vec2 x = Vec2::Zero();
    Region region = Region::conduit;
};

/// Evaluation context at an interface-edge quadrature point. bary_c / bary_m
/// locate the point inside the adjacent conduit / matrix triangle.
struct EdgeQuadCtx {
    int edge = -1;
    int qp = -1;
    Vec2 x = Vec2::Zero();
    Vec2 normal_c = Vec2::Zero();
    int tri_c = -1, tri_m = -1;
    std::array<double, 3> bary_c{};
    std::array<double, 3> bary_m{};
};

using ScalarCoeff = std::function<double(const QuadCtx&)>;
using MatrixCoeff = std::function<Mat2(const QuadCtx&)>;
using VectorCoeff = std::function<Vec2(const QuadCtx&)>;
using EdgeScalarCoeff = std::function<double(const EdgeQuadCtx&)>;
using EdgeVectorCoeff = std::function<Vec2(const EdgeQuadCtx&)>;

/// Coefficient slots; each kind reads the ones it needs (defaults: 1 / identity).
struct Coefficients {
    ScalarCoeff scalar;
    MatrixCoeff tensor;
    VectorCoeff velocity;      // advecting field a for convection
    EdgeScalarCoeff edge_scalar;
    EdgeVectorCoeff edge_velocity; // rho * a on the interface for interface_scalar
};

/// Assembles the bilinear form into CSR with rows indexed by the test space
/// and columns by the trial space. Domain kinds integrate over the triangles
/// covered by both spaces; interface kinds integrate over interface edges
/// with each space evaluated on its own side. Throws AssemblyError on
/// space/region mismatches.
CsrMatrix assemble_operator(OperatorKind kind, const FunctionSpace& trial, const FunctionSpace& test,
                            const Coefficients& coeffs = {});

// Linear functionals. The optional region restricts integration (needed when
// the target space spans the whole domain but the integrand lives on one layer).
Vector assemble_load_scalar(const FunctionSpace& space, const ScalarCoeff& f, std::optional<Region> region = {});
Vector assemble_load_vector(const FunctionSpace& space, const VectorCoeff& f, std::optional<Region> region = {});
Vector assemble_load_gradient(const FunctionSpace& space, const VectorCoeff& g, std::optional<Region> region = {});
Vector assemble_load_divergence(const FunctionSpace& space, const ScalarCoeff& g, std::optional<Region> region = {});
/// (S, grad v) for a matrix-valued source S (stress-type load).
Vector assemble_load_tensor(const FunctionSpace& space, const MatrixCoeff& S, std::optional<Region> region = {});
Vector assemble_edge_load_scalar(const FunctionSpace& space, const EdgeScalarCoeff& g);
Vector assemble_edge_load_normal(const FunctionSpace& space, const EdgeScalarCoeff& g);
Vector assemble_edge_load_vector(const FunctionSpace& space, const EdgeVectorCoeff& g);

/// Weights w_i = (1, psi_i); w . x is the integral of the discrete field.
Vector mean_weights(const FunctionSpace& space);

/// Low-level deterministic element loop: runs cell(t, triplets) over every
/// triangle accepted by filter; workers each own a contiguous range and their
/// buffers are concatenated in range order, so the output does not depend on
/// the worker count. Building block for fused multi-term kernels.
std::vector<Triplet> assemble_cells(const Mesh& mesh, const std::function<bool(int)>& filter,
                                    const std::function<void(int, std::vector<Triplet>&)>& cell);

/// Barycentric coordinates of a physical point inside triangle t.
std::array<double, 3> barycentric_of(const Mesh& mesh, int tri, const Vec2& x);

/// Assembly worker count: min(CHNSD_THREADS, hardware) with a floor of 1.
int assembly_threads();

} // namespace chnsd

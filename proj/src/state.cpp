#include "chnsd/state.hpp"

namespace chnsd {

Spaces make_spaces(const Mesh& mesh, bool mms_mode) {
    Spaces s;
    s.mesh = &mesh;
    s.Y = make_space(mesh, ElementKind::p2_scalar, SpaceRegion::whole);
    s.Xc = make_space(mesh, ElementKind::p2_vector2, SpaceRegion::conduit);
    s.Qc = make_space(mesh, ElementKind::p1_scalar, SpaceRegion::conduit);
    s.Qm = make_space(mesh, ElementKind::p1_scalar, SpaceRegion::matrix,
                      mms_mode ? Constraint::none : Constraint::zero_mean);
    s.Vm = make_space(mesh, ElementKind::p1_vector2, SpaceRegion::matrix);
    return s;
}

SimState make_state(const Spaces& spaces) {
    SimState st;
    st.phi = make_field(spaces.Y);
    st.w = make_field(spaces.Y);
    st.u_c = make_field(spaces.Xc);
    st.p_c = make_field(spaces.Qc);
    st.p_c_prev = make_field(spaces.Qc);
    st.p_m = make_field(spaces.Qm);
    st.u_m = make_field(spaces.Vm);
    return st;
}

} // namespace chnsd

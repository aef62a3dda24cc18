#include "sscmg/transfer.hpp"

#include <doctest.h>

#include <memory>

using namespace sscmg;

namespace {

std::shared_ptr<const Mesh> make_mesh(Mesh mesh) {
    return std::make_shared<Mesh>(std::move(mesh));
}

struct SpacePair {
    FeSpace coarse;
    FeSpace fine;
};

SpacePair uniform_pair(int n) {
    auto cm = make_mesh(unit_square_coarse(n));
    auto fm = make_mesh(refine_uniform(*cm));
    return {build_space(cm), build_space(fm)};
}

SpacePair local_pair() {
    auto cm = make_mesh(refine_local(unit_square_coarse(2), {0, 1}));
    std::vector<int> region;
    for (int t = 0; t < cm->num_triangles(); ++t)
        if (cm->triangles[t].parent <= 1) region.push_back(t);
    auto fm = make_mesh(refine_local(*cm, region));
    return {build_space(cm), build_space(fm)};
}

}  // namespace

TEST_CASE("prolongation carries shared vertices and edge midpoints") {
    const auto [coarse, fine] = uniform_pair(2);
    const Prolongation p = build_prolongation(coarse, fine);
    CHECK(p.rows() == fine.dim());
    CHECK(p.cols() == coarse.dim());

    // the coarse center vertex persists: entry 1 at the matching fine DoF
    REQUIRE(coarse.dim() == 1);
    const Vec2 center = coarse.mesh->vertices[coarse.free_dofs[0]];
    for (int dof = 0; dof < fine.dim(); ++dof) {
        const Vec2 q = fine.mesh->vertices[fine.free_dofs[dof]];
        const double expected = std::max(0.0, 1.0 - 2.0 * (std::abs(q.x - center.x) +
                                                           std::abs(q.y - center.y)));
        // midpoints adjacent to the center get 1/2, the center gets 1
        if (q.x == center.x && q.y == center.y) CHECK(p.m.coeff(dof, 0) == 1.0);
        if (expected == 0.5) CHECK(p.m.coeff(dof, 0) == doctest::Approx(0.5));
    }
}

TEST_CASE("prolongation is exact on coarse functions") {
    const auto [coarse, fine] = uniform_pair(4);
    const Prolongation p = build_prolongation(coarse, fine);
    CHECK(prolongation_exactness_defect(coarse, fine, p) <= 1e-12);
}

TEST_CASE("prolongation is exact through hanging constraints") {
    const auto [coarse, fine] = local_pair();
    REQUIRE(!build_space(fine.mesh).hanging.empty());
    const Prolongation p = build_prolongation(coarse, fine);
    CHECK(prolongation_exactness_defect(coarse, fine, p) <= 1e-12);
}

TEST_CASE("galerkin identity for stiffness and mass") {
    for (const auto& pair : {uniform_pair(4), local_pair()}) {
        const Prolongation p = build_prolongation(pair.coarse, pair.fine);
        const CoefficientField theta;
        const SparseOperator ac = assemble_stiffness(pair.coarse, theta);
        const SparseOperator af = assemble_stiffness(pair.fine, theta);
        CHECK(galerkin_defect(ac, p, af) <= 1e-12);

        const SparseOperator mc = assemble_mass(pair.coarse);
        const SparseOperator mf = assemble_mass(pair.fine);
        CHECK(galerkin_defect(mc, p, mf) <= 1e-12);
    }
}

TEST_CASE("perturbed prolongation breaks the galerkin identity") {
    const auto [coarse, fine] = uniform_pair(4);
    Prolongation p = build_prolongation(coarse, fine);
    const CoefficientField theta;
    const SparseOperator ac = assemble_stiffness(coarse, theta);
    const SparseOperator af = assemble_stiffness(fine, theta);

    p.m.coeffRef(0, 0) += 1e-3;
    CHECK(galerkin_defect(ac, p, af) > 1e-6);
}

TEST_CASE("constant coarse function prolongs to the fine interpolant") {
    const auto [coarse, fine] = uniform_pair(4);
    const Prolongation p = build_prolongation(coarse, fine);
    // coefficients of the coarse interpolant of 1 on interior vertices
    Vector ones = Vector::Ones(coarse.dim());
    const Vector lifted = p.apply(ones);
    // away from the boundary layer the fine interpolant is 1 as well
    for (int dof = 0; dof < fine.dim(); ++dof) {
        const Vec2 q = fine.mesh->vertices[fine.free_dofs[dof]];
        if (q.x >= 0.25 && q.x <= 0.75 && q.y >= 0.25 && q.y <= 0.75)
            CHECK(lifted[dof] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

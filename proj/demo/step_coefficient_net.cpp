// Grades a mollified family around a conductivity jump: moderateness of
// the net, negligibility of the mollifier choice, and consistency with
// the exact two-parameter solve.

#include <cmath>
#include <cstdio>
#include <vector>

#include "heatprop/heatprop.hpp"

using namespace heatprop;

int main() {
    SpatialGrid grid(1, 256, 14.0);
    Field u0 = field_from_gaussian(grid,
                                   GaussianState{SpdMatrix::scaled_identity(1, 0.5), 1.0});
    auto base = DiffusivityModel::piecewise_constant(
        {1.0}, {SpdMatrix::scaled_identity(1, 1.0), SpdMatrix::scaled_identity(1, 3.0)});
    const std::vector<double> times{0.5, 1.0, 1.5};

    std::vector<double> eps(9);
    for (int i = 0; i < 9; ++i) eps[i] = std::pow(10.0, -1.0 - 0.25 * i);

    EpsNet net_a(eps, base, MollifierSpec(MollifierSpec::Kind::QuarticBump));
    EpsNet net_b(eps, base, MollifierSpec(MollifierSpec::Kind::SexticBump));
    auto sols_a = solve_net(net_a, u0, times);
    auto sols_b = solve_net(net_b, u0, times);
    Trajectory reference = solve_homogeneous(u0, base, times);

    const std::vector<SeminormKind> kinds{SeminormKind::SupL2, SeminormKind::SupH1};
    NetDiagnostics mod = moderateness_diagnostic(eps, sols_a, kinds);
    NetDiagnostics neg = negligibility_diagnostic(eps, sols_a, sols_b, kinds);
    NetDiagnostics cons = consistency_check(eps, sols_a, reference);

    std::printf("epsilon      distance to exact   quartic vs sextic\n");
    for (size_t i = 0; i < eps.size(); ++i)
        std::printf("%.4e   %.6e        %.6e\n", eps[i], cons.values[0][i],
                    neg.values[0][i]);
    std::printf("\nmoderateness:  %s, order %d\n", mod.verdict.c_str(),
                mod.moderateness_order);
    std::printf("negligibility: %s, slope %.3f\n", neg.verdict.c_str(), neg.fits[0].slope);
    std::printf("consistency:   %s, slope %.3f\n", cons.verdict.c_str(),
                cons.fits[0].slope);
    return 0;
}

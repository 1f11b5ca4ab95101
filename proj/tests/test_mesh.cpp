// Copyright (c) 2026 The geocorr Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "geocorr/augment.hpp"
#include "geocorr/geodesics.hpp"
#include "geocorr/mesh_io.hpp"
#include "geocorr/primitives.hpp"
#include "geocorr/sampling.hpp"

#include "test_support.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <gtest/gtest.h>

#include <map>
#include <numbers>

using namespace geocorr;

namespace {

const char* kTetraObj =
    "# unit tetrahedron\n"
    "v 0.35355339059327373 0.35355339059327373 0.35355339059327373\n"
    "v 0.35355339059327373 -0.35355339059327373 -0.35355339059327373\n"
    "v -0.35355339059327373 0.35355339059327373 -0.35355339059327373\n"
    "v -0.35355339059327373 -0.35355339059327373 0.35355339059327373\n"
    "f 1 2 3\nf 1 4 2\nf 1 3 4\nf 2 4 3\n";

}  // namespace

TEST(MeshIo, TetrahedronObjArea) {
  TriMesh m = parse_obj(kTetraObj);
  EXPECT_EQ(m.num_vertices(), 4);
  EXPECT_EQ(m.num_faces(), 4);
  EXPECT_NEAR(m.total_area(), std::sqrt(3.0), 1e-12);
  EXPECT_TRUE(m.is_connected());
}

TEST(MeshIo, QuadFaceReportsLine) {
  const char* obj = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
  try {
    parse_obj(obj);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Data);
    EXPECT_NE(std::string(e.what()).find("non-triangular face at line 5"), std::string::npos) << e.what();
  }
}

TEST(MeshIo, ParseErrorsCarryLineNumbers) {
  EXPECT_THROW(parse_obj("v 0 0 x\n"), Error);
  try {
    parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
  }
  EXPECT_THROW(parse_obj("# nothing\n"), Error);
  EXPECT_THROW(parse_ply("ply\nformat binary_little_endian 1.0\nend_header\n"), Error);
}

TEST(MeshIo, PlyAndObjAgree) {
  auto dir = test::scratch_dir("meshio");
  TriMesh ico = make_icosphere(1.0, 1);
  save_ply(ico, dir / "a.ply");
  save_obj(ico, dir / "a.obj");
  TriMesh a = load_mesh(dir / "a.ply");
  TriMesh b = load_mesh(dir / "a.obj");
  EXPECT_EQ(a.vertices(), ico.vertices());
  EXPECT_EQ(b.vertices(), ico.vertices());
  EXPECT_EQ(a.faces(), ico.faces());
  Labels labels = {3, 1, 4, 1, 5};
  save_labels(labels, dir / "l.txt");
  EXPECT_EQ(load_labels(dir / "l.txt"), labels);
}

TEST(MeshIo, IcosphereAreaNearSphere) {
  TriMesh ico = make_icosphere(1.0, 2);
  EXPECT_LT(std::abs(ico.total_area() - 4.0 * std::numbers::pi) / (4.0 * std::numbers::pi), 0.03);
}

TEST(VertexAreas, ClosedForms) {
  Points v(3, 3);
  v << 0, 0, 0, 1, 0, 0, 0.5, std::sqrt(3.0) / 2, 0;
  Triangles f(1, 3);
  f << 0, 1, 2;
  Eigen::VectorXd a = vertex_areas(v, f);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(a[i], std::sqrt(3.0) / 4 / 3, 1e-15);

  TriMesh tet = make_tetrahedron(1.0);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(tet.vertex_area()[i], std::sqrt(3.0) / 4, 1e-12);
}

TEST(VertexAreas, IsolatedVertexGetsZero) {
  Points v(4, 3);
  v << 0, 0, 0, 1, 0, 0, 0, 1, 0, 5, 5, 5;
  Triangles f(1, 3);
  f << 0, 1, 2;
  EXPECT_EQ(vertex_areas(v, f)[3], 0.0);
}

TEST(VertexAreas, PartitionOnEveryMesh) {
  for (const TriMesh& m : {make_icosphere(1.3, 2), make_grid(7, 5, 0.3), test::random_patch(8, 8, 3)}) {
    double faces = 0.0;
    for (Index f = 0; f < m.num_faces(); ++f) {
      faces += triangle_area(m.vertices().row(m.faces()(f, 0)).transpose(), m.vertices().row(m.faces()(f, 1)).transpose(),
                             m.vertices().row(m.faces()(f, 2)).transpose());
    }
    EXPECT_NEAR(m.vertex_area().sum(), faces, 1e-9 * faces);
  }
}

TEST(VertexAreas, IcosphereSymmetryByValence) {
  TriMesh ico = make_icosphere(1.0, 2);
  std::vector<int> valence(static_cast<std::size_t>(ico.num_vertices()));
  for (Index v = 0; v < ico.num_vertices(); ++v) valence[static_cast<std::size_t>(v)] = static_cast<int>(ico.neighbors(v).size());
  // The 12 valence-5 vertices are equivalent under the icosahedral group.
  double lo = 1e300, hi = 0.0;
  for (Index v = 0; v < ico.num_vertices(); ++v) {
    if (valence[static_cast<std::size_t>(v)] != 5) continue;
    lo = std::min(lo, ico.vertex_area()[v]);
    hi = std::max(hi, ico.vertex_area()[v]);
  }
  EXPECT_LT((hi - lo) / hi, 1e-6);
}

TEST(Curvature, FlatGridIsZero) {
  TriMesh g = make_grid(6, 6, 0.5);
  for (Index v = 0; v < g.num_vertices(); ++v) EXPECT_LT(g.curvature()[v], 1e-8);
}

TEST(Curvature, SphereMatchesInverseRadius) {
  for (double r : {1.0, 2.0}) {
    TriMesh ico = make_icosphere(r, 3);
    for (Index v = 0; v < ico.num_vertices(); ++v) {
      EXPECT_NEAR(ico.curvature()[v], 1.0 / r, 0.1 / r) << "vertex " << v;
    }
  }
}

TEST(Curvature, BoundaryCopiesNearestInterior) {
  TriMesh strip = make_strip(6);
  // A strip has no interior vertex; the copy has nothing to copy from.
  EXPECT_EQ(strip.curvature().size(), 12);
  Points v = make_grid(5, 5, 1.0).vertices();
  for (Index i = 0; i < v.rows(); ++i) v(i, 2) = 0.1 * (v(i, 0) - 2) * (v(i, 0) - 2);
  TriMesh bowl(v, make_grid(5, 5, 1.0).faces());
  // Corner 0 is closest to interior vertex 6 (grid index (1,1)).
  EXPECT_EQ(bowl.curvature()[0], bowl.curvature()[6]);
  EXPECT_GT(bowl.curvature()[6], 0.0);
}

TEST(Augment, RotationOnlyIsRigidAndIdentity) {
  TriMesh ico = make_icosphere(1.0, 2);
  Labels labels(static_cast<std::size_t>(ico.num_vertices()), 0);
  AugmentSpec spec{{RotateStep{7}}, 7};
  AugmentedMesh a = augment(ico, labels, spec);
  for (Index i = 0; i < ico.num_vertices(); ++i) EXPECT_EQ(a.anchors.h[static_cast<std::size_t>(i)], i);
  EXPECT_GT((a.mesh.vertices() - ico.vertices()).norm(), 1e-3);
  for (Index i = 0; i < ico.num_vertices(); i += 7) {
    for (Index j = 0; j < ico.num_vertices(); j += 5) {
      EXPECT_NEAR((a.mesh.vertices().row(i) - a.mesh.vertices().row(j)).norm(),
                  (ico.vertices().row(i) - ico.vertices().row(j)).norm(), 1e-9);
    }
  }
}

TEST(Augment, RotationsAreProper) {
  for (std::uint64_t s = 0; s < 50; ++s) {
    Mat3 r = random_rotation(s);
    EXPECT_LT((r * r.transpose() - Mat3::Identity()).norm(), 1e-9);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-9);
  }
}

TEST(Augment, SubdivideSingleTriangle) {
  Points v(3, 3);
  v << 0, 0, 0, 1, 0, 0, 0, 1, 0;
  Triangles f(1, 3);
  f << 0, 1, 2;
  TriMesh tri(v, f);
  AugmentedMesh a = augment(tri, {0, 1, 2}, AugmentSpec{{SubdivideStep{}}, 1});
  EXPECT_EQ(a.mesh.num_vertices(), 6);
  EXPECT_EQ(a.mesh.num_faces(), 4);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(a.anchors.h[static_cast<std::size_t>(i)], i);
  // Midpoints follow the lower parent index.
  EXPECT_EQ(std::vector<int>(a.anchors.h.begin() + 3, a.anchors.h.end()), (std::vector<int>{0, 0, 1}));
  EXPECT_NEAR(a.mesh.total_area(), tri.total_area(), 1e-15);
}

TEST(Augment, LabelsPropagateThroughSubdivideAndDecimate) {
  TriMesh ico = make_icosphere(1.0, 2);
  Labels labels;
  for (Index v = 0; v < ico.num_vertices(); ++v) {
    labels.push_back(ico.vertices()(v, 0) > 0.3 ? 1 : (ico.vertices()(v, 1) > 0 ? 2 : 0));
  }
  const int half = static_cast<int>(ico.num_vertices() / 2);
  AugmentSpec spec{{SubdivideStep{}, DecimateStep{half}}, 11};
  AugmentedMesh a = augment(ico, labels, spec);
  EXPECT_LE(a.mesh.num_vertices(), half);
  EXPECT_GE(a.mesh.num_vertices(), 4);
  ASSERT_EQ(a.anchors.h.size(), static_cast<std::size_t>(a.mesh.num_vertices()));

  // Independent replay of the propagation rule, step by step.
  Subdivision sub = midpoint_subdivide(ico.vertices(), ico.faces());
  std::vector<int> h(static_cast<std::size_t>(ico.num_vertices()));
  std::iota(h.begin(), h.end(), 0);
  for (auto p : sub.midpoint_parents) h.push_back(std::min(p[0], p[1]));
  TriMesh fine(sub.vertices, sub.faces);
  Decimation dec = cluster_decimate(fine, half);
  for (std::size_t k = 0; k < dec.representative.size(); ++k) {
    const int expected = h[static_cast<std::size_t>(dec.representative[k])];
    EXPECT_EQ(a.anchors.h[k], expected);
    EXPECT_EQ(a.anchors.labels_aug[k], labels[static_cast<std::size_t>(expected)]);
    EXPECT_EQ(a.mesh.vertices().row(static_cast<Index>(k)), fine.vertices().row(dec.representative[k]));
  }
  EXPECT_TRUE(labels_consistent(a.anchors));
}

TEST(Augment, ReplayIsBitIdenticalAndSpecRoundTrips) {
  TriMesh ico = make_icosphere(1.0, 2);
  Labels labels(static_cast<std::size_t>(ico.num_vertices()), 4);
  AugmentSpec spec{{RotateStep{}, SubdivideStep{}, DecimateStep{300}, RotateStep{99}}, 5};
  AugmentedMesh a = augment(ico, labels, spec);
  AugmentSpec back = augment_spec_from_json(nlohmann::json::parse(to_json(spec).dump()));
  EXPECT_EQ(to_json(back), to_json(spec));
  AugmentedMesh b = augment(ico, labels, a.anchors.chain);
  EXPECT_EQ(a.mesh.vertices(), b.mesh.vertices());
  EXPECT_EQ(a.anchors.h, b.anchors.h);
  AnchorMap parsed = anchor_map_from_json(nlohmann::json::parse(to_json(a.anchors).dump()));
  EXPECT_EQ(parsed.h, a.anchors.h);
}

TEST(Augment, Errors) {
  TriMesh ico = make_icosphere(1.0, 1);
  Labels labels(static_cast<std::size_t>(ico.num_vertices()), 0);
  EXPECT_THROW(augment(ico, labels, AugmentSpec{{DecimateStep{3}}, 0}), Error);
  EXPECT_THROW(augment(ico, Labels{1, 2}, AugmentSpec{}), Error);
  EXPECT_THROW(augment_spec_from_json(nlohmann::json::parse(R"({"steps":[{"op":"twist"}]})")), Error);
}

TEST(Fps, AllVerticesAndSeedRule) {
  auto ico = std::make_shared<const TriMesh>(make_icosphere(1.0, 1));
  auto geo = make_geodesic_provider(ico);
  auto all = fps(*ico, *geo, static_cast<int>(ico->num_vertices()));
  std::vector<int> sorted = all.centers;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < static_cast<int>(sorted.size()); ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
  EXPECT_EQ(fps(*ico, *geo, static_cast<int>(ico->num_vertices())).centers, all.centers);

  Points v = make_grid(4, 3, 1.0).vertices();
  v(5, 0) += 0.2;  // enlarges the one-ring area of vertex 5
  TriMesh grid(v, make_grid(4, 3, 1.0).faces());
  Index best = 0;
  grid.vertex_area().maxCoeff(&best);
  DenseGeodesics gd(std::make_shared<const GeoMatrix>(all_pairs(grid)));
  EXPECT_EQ(fps(grid, gd, 1).centers, std::vector<int>{static_cast<int>(best)});
  EXPECT_THROW(fps(grid, gd, 13), Error);
}

TEST(Fps, SecondCenterIsFarthestOnStrip) {
  TriMesh strip = make_strip(12, 1.0, 0.5);
  GeoMatrix g = all_pairs(strip);
  DenseGeodesics gd(std::make_shared<const GeoMatrix>(g));
  auto r = fps(strip, gd, 2);
  const int first = r.centers[0];
  double far = 0.0;
  for (Index v = 0; v < strip.num_vertices(); ++v) far = std::max(far, g(first, v));
  EXPECT_DOUBLE_EQ(g(first, r.centers[1]), far);
  // Exhaustive: nothing beats it, and it is an end column.
  const int col = r.centers[1] % 12;
  EXPECT_TRUE(col == 0 || col == 11);
}

TEST(Fps, CoverageIsNonIncreasing) {
  TriMesh patch = test::random_patch(9, 9, 21);
  DenseGeodesics gd(std::make_shared<const GeoMatrix>(all_pairs(patch)));
  auto r = fps(patch, gd, 40);
  for (std::size_t j = 2; j < r.coverage.size(); ++j) EXPECT_LE(r.coverage[j], r.coverage[j - 1]);
}

namespace {

// Egg-shaped bumpy sphere: distinct variances and a clear skew along x.
TriMesh egg() {
  TriMesh s = test::bumpy_sphere(3, 5);
  Points v = s.vertices();
  for (Index i = 0; i < v.rows(); ++i) v(i, 0) = 1.4 * v(i, 0) + 0.4 * v(i, 0) * v(i, 0);
  return TriMesh(std::move(v), s.faces());
}

}  // namespace

TEST(PrincipalFrame, MatchesMonteCarloMoments) {
  const TriMesh m = egg();
  const PrincipalFrame fr = principal_frame(m);
  EXPECT_NEAR((fr.axes.transpose() * fr.axes - Mat3::Identity()).norm(), 0.0, 1e-12);
  EXPECT_GT(fr.variance[0], fr.variance[1]);
  EXPECT_GT(fr.variance[1], fr.variance[2]);

  // Area-proportional face choice, uniform point within the face.
  std::mt19937_64 rng(3);
  std::vector<double> fa(static_cast<std::size_t>(m.num_faces()));
  for (Index f = 0; f < m.num_faces(); ++f) {
    fa[f] = triangle_area(m.vertices().row(m.faces()(f, 0)), m.vertices().row(m.faces()(f, 1)),
                          m.vertices().row(m.faces()(f, 2)));
  }
  std::discrete_distribution<Index> pick(fa.begin(), fa.end());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 400000;
  Points p(n, 3);
  for (int k = 0; k < n; ++k) {
    const Index f = pick(rng);
    double r1 = std::sqrt(u(rng)), r2 = u(rng);
    const Vec3 a = m.vertices().row(m.faces()(f, 0)), b = m.vertices().row(m.faces()(f, 1)),
               c = m.vertices().row(m.faces()(f, 2));
    p.row(k) = ((1 - r1) * a + r1 * (1 - r2) * b + r1 * r2 * c).transpose();
  }
  const Vec3 mu = p.colwise().mean().transpose();
  EXPECT_LT((mu - fr.centroid).norm(), 5e-3);
  const Eigen::MatrixXd proj = (p.rowwise() - fr.centroid.transpose()) * fr.axes;
  for (int k = 0; k < 3; ++k) {
    const double var = proj.col(k).squaredNorm() / n;
    const double m3 = proj.col(k).array().cube().mean();
    EXPECT_NEAR(var, fr.variance[k], 0.02 * fr.variance[k]);
    EXPECT_NEAR(m3 / std::pow(var, 1.5), fr.skewness[k], 0.03);
    EXPECT_GE(fr.skewness[k], 0.0);
  }
  EXPECT_GT(fr.skewness[0], 0.1);
  // Off-diagonal covariance vanishes in the frame.
  EXPECT_LT(std::abs(proj.col(0).dot(proj.col(1)) / n), 0.02 * fr.variance[1]);
}

TEST(PrincipalFrame, CoordinatesIgnoreRigidMotionAndScale) {
  const TriMesh m = egg();
  auto coords = [](const TriMesh& x) {
    const PrincipalFrame fr = principal_frame(x);
    return Eigen::MatrixXd(((x.vertices().rowwise() - fr.centroid.transpose()) * fr.axes) / x.length_scale());
  };
  const Eigen::MatrixXd c0 = coords(m);
  const Mat3 r = Eigen::AngleAxisd(2.1, Vec3(-1, 2, 0.5).normalized()).toRotationMatrix();
  EXPECT_LT((coords(m.transformed(r, Vec3(5, -2, 1)).scaled(0.3)) - c0).cwiseAbs().maxCoeff(), 1e-9);
  // Moments of a mirror image are the mirrored moments, skew sign included.
  Points mirrored = m.vertices();
  mirrored.col(0) *= -1.0;
  Triangles flipped = m.faces();
  flipped.col(1).swap(flipped.col(2));
  const PrincipalFrame a = principal_frame(m), b = principal_frame(TriMesh(mirrored, flipped));
  const Mat3 mirror = Vec3(-1, 1, 1).asDiagonal();
  for (int k = 0; k < 3; ++k) EXPECT_LT((b.axes.col(k) - mirror * a.axes.col(k)).norm(), 1e-9);
  EXPECT_THROW(principal_frame(TriMesh()), Error);
}

#include <limits>
#include <stdexcept>

#include <gtest/gtest.h>

#include "graphost/matrix.hpp"

using namespace graphost;

TEST(Matrix, ProductsAgreeWithHandValues) {
  const Matrix a{{1, 2}, {3, 4}};
  const Matrix b{{5, 6}, {7, 8}};
  EXPECT_EQ(matmul(a, b), (Matrix{{19, 22}, {43, 50}}));
  EXPECT_EQ(matmul_transpose_a(a, b), (Matrix{{26, 30}, {38, 44}}));
  EXPECT_EQ(matmul_transpose_b(a, b), (Matrix{{17, 23}, {39, 53}}));
  EXPECT_EQ(matmul(a, Matrix::identity(2)), a);
}

TEST(Matrix, RowVectorAndColumnSums) {
  Matrix m{{1, 2}, {3, 4}};
  add_row_vector(m, std::vector<double>{10, 20});
  EXPECT_EQ(m, (Matrix{{11, 22}, {13, 24}}));
  EXPECT_EQ(column_sums(m), (std::vector<double>{24, 46}));
}

TEST(Matrix, RejectsInconsistentShapes) {
  EXPECT_THROW(Matrix(2, 2, std::vector<double>{1, 2, 3}), std::invalid_argument);
  EXPECT_THROW((Matrix{{1, 2}, {3}}), std::invalid_argument);
  EXPECT_THROW(matmul(Matrix(2, 3), Matrix(2, 3)), std::invalid_argument);
  Matrix m(2, 2);
  EXPECT_THROW(add_row_vector(m, std::vector<double>{1}), std::invalid_argument);
}

TEST(Matrix, FinitenessCheck) {
  Matrix m(1, 2);
  EXPECT_TRUE(m.all_finite());
  m(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(m.all_finite());
}

#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace chnsd {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vector = Eigen::VectorXd;

enum class SolveMethod { direct, iterative };

struct MeshError : std::runtime_error {
    explicit MeshError(const std::string& msg) : std::runtime_error("mesh: " + msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error("config: " + msg) {}
};

struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error("solver: " + msg) {}
};

struct AssemblyError : std::runtime_error {
    explicit AssemblyError(const std::string& msg) : std::runtime_error("assembly: " + msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error("io: " + msg) {}
};

} // namespace chnsd

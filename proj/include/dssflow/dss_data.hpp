#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dssflow/errors.hpp"
#include "dssflow/util.hpp"

namespace dssflow {

enum class FieldKind { Scalar, Vector3 };

struct ScaleFactor {
    double lambda;
    explicit ScaleFactor(double l) : lambda(l) {
        if (!(l > 1.0)) throw ConfigError("DSS factor lambda must be > 1");
    }
    // period of the similarity-variable time s
    double period() const { return 2.0 * std::log(lambda); }
};

// Data on the fundamental annulus {1 <= |z| < lambda}. Scalar data returns its
// value in .x.
class AnnulusData {
  public:
    virtual ~AnnulusData() = default;
    virtual Vec3 eval(const Vec3& z) const = 0;
    // trapezoid nodes needed to resolve the data along an azimuthal circle
    virtual int angular_hint() const { return 16; }
    // true if the DSS extension is smooth away from the origin (analytic
    // fields and interior-supported bumps)
    virtual bool smooth_extension() const { return true; }
    virtual std::uint64_t content_hash() const = 0;
};

// lambda-DSS (or (-1)-homogeneous) initial data: value(x) = lambda^j *
// annulus(lambda^j x) for the unique j with lambda^j |x| in [1, lambda).
class DssField {
  public:
    DssField(std::string name, FieldKind kind, ScaleFactor lambda, bool homogeneous,
             std::shared_ptr<const AnnulusData> data);

    const std::string& name() const { return name_; }
    FieldKind kind() const { return kind_; }
    const ScaleFactor& scale() const { return lambda_; }
    bool homogeneous() const { return homogeneous_; }
    const AnnulusData& annulus() const { return *data_; }

    // DSS extension; throws GeometryError at x = 0 (data is singular there).
    Vec3 eval(const Vec3& x) const;
    double eval_scalar(const Vec3& x) const;

    // sup of |value| over the fundamental annulus (sampled once, cached);
    // feeds quadrature truncation bounds
    double sup_annulus() const;

    std::uint64_t content_hash() const;

  private:
    std::string name_;
    FieldKind kind_;
    ScaleFactor lambda_;
    bool homogeneous_;
    std::shared_ptr<const AnnulusData> data_;
    mutable double sup_cache_ = -1.0;
};

// External force, represented by its similarity-variable profile F(y, s)
// (T-periodic). The physical f(x,t) = t^{-3/2} F(x/sqrt(t), log t) is lambda-DSS
// by construction.
class DssForce {
  public:
    DssForce() : lambda_(2.0) {}  // zero force
    DssForce(std::string name, ScaleFactor lambda, std::function<Vec3(const Vec3&, double)> F);

    bool is_zero() const { return !F_; }
    const std::string& name() const { return name_; }
    Vec3 profile(const Vec3& y, double s) const { return F_ ? F_(y, s) : Vec3{}; }
    Vec3 eval_physical(const Vec3& x, double t) const;

  private:
    std::string name_ = "none";
    ScaleFactor lambda_;
    std::function<Vec3(const Vec3&, double)> F_;
};

// ---- built-in benchmark fields ----------------------------------------------

std::vector<std::string> builtin_field_names();
DssField builtin_field(const std::string& name, double lambda);
DssForce builtin_force(const std::string& name, double lambda);

// ---- Lorentz quasinorm -------------------------------------------------------

struct AnnulusGridSpec {
    int n_r = 64;
    int n_theta = 64;
    int n_phi = 64;
};

// Estimate of sup_t t |{|f| > t}|^{1/3} from the decreasing rearrangement of
// samples on the fundamental annulus; the DSS scaling extends one annulus to
// the full dyadic union exactly (level volumes scale by lambda^{-3j}).
double lorentz_3inf_estimate(const DssField& field, const AnnulusGridSpec& grid = {});

// ---- gridded annulus data file -----------------------------------------------

// File framing: magic "DSSANN01", u64 JSON length, JSON header
// {kind, lambda, n_r, n_theta, n_phi}, raw little-endian float64 in C order
// (r, theta, phi, component). Nodes sit at cell centers in log r and theta,
// and at uniform phi.
DssField read_annulus_file(const std::string& path);
void write_annulus_file(const std::string& path, const DssField& field, const AnnulusGridSpec& g);

}  // namespace dssflow

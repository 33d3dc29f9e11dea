#pragma once

#include <span>

#include "dssflow/box.hpp"

namespace dssflow {

// Scalar or 3-vector field on a Box, kept in physical and/or spectral
// representation with lazy transforms. Components are stored contiguously,
// component-major. A field is not safe to mutate (including lazy transforms)
// from two threads at once; distinct fields are independent.
class Field {
  public:
    Field() = default;
    Field(BoxPtr box, int ncomp);

    const Box& box() const { return *box_; }
    const BoxPtr& box_ptr() const { return box_; }
    int ncomp() const { return ncomp_; }

    const RealVec& phys() const;
    const CplxVec& spec() const;
    RealVec& phys_mut();  // ensures physical rep, invalidates spectral
    CplxVec& spec_mut();  // ensures spectral rep, invalidates physical

    // Access for writing fresh data without a transform of stale contents.
    RealVec& phys_raw();
    CplxVec& spec_raw();

    std::span<double> comp_phys(int c) { return {phys_mut().data() + c * box_->nphys(), box_->nphys()}; }
    std::span<const double> comp_phys(int c) const { return {phys().data() + c * box_->nphys(), box_->nphys()}; }
    std::span<Cplx> comp_spec(int c) { return {spec_mut().data() + c * box_->nspec(), box_->nspec()}; }
    std::span<const Cplx> comp_spec(int c) const { return {spec().data() + c * box_->nspec(), box_->nspec()}; }

    bool has_phys() const { return phys_ok_; }
    bool has_spec() const { return spec_ok_; }

    void set_zero();
    void scale(double c);
    void axpy(double c, const Field& other);  // this += c*other

    Field clone() const { return *this; }

  private:
    BoxPtr box_;
    int ncomp_ = 0;
    mutable RealVec phys_;
    mutable CplxVec spec_;
    mutable bool phys_ok_ = false, spec_ok_ = false;
};

Field make_scalar(BoxPtr box);
Field make_vector(BoxPtr box);

}  // namespace dssflow

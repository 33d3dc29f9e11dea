#include "dssflow/field.hpp"

#include "dssflow/errors.hpp"

namespace dssflow {

Field::Field(BoxPtr box, int ncomp) : box_(std::move(box)), ncomp_(ncomp) {
    phys_.assign(ncomp_ * box_->nphys(), 0.0);
    spec_.assign(ncomp_ * box_->nspec(), Cplx(0.0));
    phys_ok_ = spec_ok_ = true;
}

const RealVec& Field::phys() const {
    if (!phys_ok_) {
        const Fft& fft = Fft::get(box_->N);
        phys_.resize(ncomp_ * box_->nphys());
        RealVec out;
        for (int c = 0; c < ncomp_; ++c) {
            CplxVec in(spec_.begin() + c * box_->nspec(), spec_.begin() + (c + 1) * box_->nspec());
            fft.backward(in, out);
            std::copy(out.begin(), out.end(), phys_.begin() + c * box_->nphys());
        }
        phys_ok_ = true;
    }
    return phys_;
}

const CplxVec& Field::spec() const {
    if (!spec_ok_) {
        const Fft& fft = Fft::get(box_->N);
        spec_.resize(ncomp_ * box_->nspec());
        CplxVec out;
        for (int c = 0; c < ncomp_; ++c) {
            RealVec in(phys_.begin() + c * box_->nphys(), phys_.begin() + (c + 1) * box_->nphys());
            fft.forward(in, out);
            std::copy(out.begin(), out.end(), spec_.begin() + c * box_->nspec());
        }
        spec_ok_ = true;
    }
    return spec_;
}

RealVec& Field::phys_mut() {
    phys();
    spec_ok_ = false;
    return phys_;
}

CplxVec& Field::spec_mut() {
    spec();
    phys_ok_ = false;
    return spec_;
}

RealVec& Field::phys_raw() {
    phys_.resize(ncomp_ * box_->nphys());
    phys_ok_ = true;
    spec_ok_ = false;
    return phys_;
}

CplxVec& Field::spec_raw() {
    spec_.resize(ncomp_ * box_->nspec());
    spec_ok_ = true;
    phys_ok_ = false;
    return spec_;
}

void Field::set_zero() {
    spec_raw().assign(ncomp_ * box_->nspec(), Cplx(0.0));
    phys_.assign(ncomp_ * box_->nphys(), 0.0);
    phys_ok_ = true;
}

void Field::scale(double c) {
    if (spec_ok_) {
        for (auto& v : spec_) v *= c;
        if (phys_ok_)
            for (auto& v : phys_) v *= c;
    } else {
        for (auto& v : phys_) v *= c;
    }
}

void Field::axpy(double c, const Field& other) {
    if (ncomp_ != other.ncomp_ || !box_->same_grid(other.box()))
        throw UsageError("axpy: field layout mismatch");
    if (spec_ok_ && other.has_spec()) {
        const CplxVec& o = other.spec();
        for (std::size_t i = 0; i < spec_.size(); ++i) spec_[i] += c * o[i];
        phys_ok_ = false;
    } else {
        const RealVec& o = other.phys();
        phys_mut();
        for (std::size_t i = 0; i < phys_.size(); ++i) phys_[i] += c * o[i];
    }
}

Field make_scalar(BoxPtr box) { return Field(std::move(box), 1); }
Field make_vector(BoxPtr box) { return Field(std::move(box), 3); }

}  // namespace dssflow

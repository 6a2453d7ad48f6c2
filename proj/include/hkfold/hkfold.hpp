#pragma once

#include "hkfold/airy.hpp"
#include "hkfold/asymptotics.hpp"
#include "hkfold/csv.hpp"
#include "hkfold/errors.hpp"
#include "hkfold/folding_model.hpp"
#include "hkfold/hamiltonian.hpp"
#include "hkfold/hk_propagator.hpp"
#include "hkfold/manifold.hpp"
#include "hkfold/parallel.hpp"
#include "hkfold/quadrature.hpp"
#include "hkfold/quantum_oracle.hpp"
#include "hkfold/roots.hpp"

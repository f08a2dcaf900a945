#pragma once

#include "cavband/analysis.hpp"
#include "cavband/effective_hamiltonian.hpp"
#include "cavband/errors.hpp"
#include "cavband/fourier_potential.hpp"
#include "cavband/full_model.hpp"
#include "cavband/oned.hpp"
#include "cavband/parallel.hpp"
#include "cavband/parent_overlap.hpp"
#include "cavband/run.hpp"
#include "cavband/run_config.hpp"
#include "cavband/spectral.hpp"
#include "cavband/topology.hpp"
#include "cavband/version.hpp"

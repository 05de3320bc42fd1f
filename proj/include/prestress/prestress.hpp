#pragma once

// Umbrella header for the library.

#include <prestress/errors.hpp>
#include <prestress/tensor.hpp>
#include <prestress/constitutive.hpp>
#include <prestress/viscoelastic.hpp>
#include <prestress/quadrature.hpp>
#include <prestress/solvers.hpp>
#include <prestress/tube.hpp>
#include <prestress/energy_scan.hpp>
#include <prestress/driver.hpp>
#include <prestress/config.hpp>
#include <prestress/commands.hpp>

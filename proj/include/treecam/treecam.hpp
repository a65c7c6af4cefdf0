#pragma once

#include "treecam/cart.hpp"
#include "treecam/circuit.hpp"
#include "treecam/compiler.hpp"
#include "treecam/dataset.hpp"
#include "treecam/error.hpp"
#include "treecam/faults.hpp"
#include "treecam/geometry.hpp"
#include "treecam/interchange.hpp"
#include "treecam/io.hpp"
#include "treecam/mapper.hpp"
#include "treecam/simulator.hpp"
#include "treecam/synthetic.hpp"
#include "treecam/tree.hpp"

//! Resolving a Boolean function from the command line: a hex id, a truth-table
//! bit string, or a minterm list file.

use std::fs;
use std::path::PathBuf;

use clap::Args;
use sshr_core::BoolFn;

use crate::CliError;

#[derive(Args, Debug, Clone)]
pub struct FunctionSource {
    /// Truth-table id as hex, e.g. 0x46b9
    #[arg(long, value_name = "HEX")]
    pub id: Option<String>,

    /// Truth-table bit string of length 2^n, most significant bit first
    #[arg(long, value_name = "BITS", conflicts_with = "id")]
    pub bits: Option<String>,

    /// File with one decimal minterm per line
    #[arg(long, value_name = "FILE", conflicts_with_all = ["id", "bits"])]
    pub minterms: Option<PathBuf>,
}

impl FunctionSource {
    pub fn resolve(&self, n: u8) -> Result<BoolFn, CliError> {
        let parsed = if let Some(id) = &self.id {
            BoolFn::from_hex_id(id, n)
        } else if let Some(bits) = &self.bits {
            BoolFn::from_bit_string(bits, n)
        } else if let Some(path) = &self.minterms {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::BadInput(format!("cannot read {}: {e}", path.display())))?;
            BoolFn::from_minterm_list(&text, n)
        } else {
            return Err(CliError::BadInput(
                "a function is required: pass --id, --bits, or --minterms".into(),
            ));
        };
        parsed.map_err(|e| CliError::BadInput(e.to_string()))
    }
}

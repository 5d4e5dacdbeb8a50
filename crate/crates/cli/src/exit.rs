use specpert_core::Error;

pub const FAILURE: u8 = 1;
pub const DIMENSION_MISMATCH: u8 = 2;
pub const CONFIG_PARSE: u8 = 2;
pub const UNREADABLE: u8 = 3;
pub const INDEX_OUT_OF_RANGE: u8 = 4;

#[derive(Debug)]
pub struct Exit {
    pub code: u8,
    pub message: String,
}

impl Exit {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(FAILURE, message)
    }

    pub fn unreadable(what: &std::path::Path, e: impl std::fmt::Display) -> Self {
        Self::new(UNREADABLE, format!("{}: {e}", what.display()))
    }

    pub fn io(what: &std::path::Path, e: std::io::Error) -> Self {
        Self::new(FAILURE, format!("{}: {e}", what.display()))
    }
}

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionMismatch { .. } => DIMENSION_MISMATCH,
            Error::IndexOutOfRange { .. } => INDEX_OUT_OF_RANGE,
            _ => FAILURE,
        };
        Self::new(code, e.to_string())
    }
}

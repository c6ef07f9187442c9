//! Error split driving the exit code: user-input problems exit 2,
//! internal failures exit 1.

pub enum CliError {
    User(anyhow::Error),
    Internal(anyhow::Error),
}

pub type CliResult = Result<(), CliError>;

/// Tag a fallible expression's error as a user-input problem.
pub trait UserInput<T> {
    fn user_input(self) -> Result<T, CliError>;
    fn internal(self) -> Result<T, CliError>;
}

impl<T, E> UserInput<T> for Result<T, E>
where
    E: Into<anyhow::Error>,
{
    fn user_input(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::User(e.into()))
    }

    fn internal(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Internal(e.into()))
    }
}

pub fn user_error(err: anyhow::Error) -> CliError {
    CliError::User(err)
}

//! How large a partition each exemplar family leaks, as n grows.

fn main() -> qseal::Result<()> {
    println!("{}", qseal::runner::table1_demo()?);
    Ok(())
}
